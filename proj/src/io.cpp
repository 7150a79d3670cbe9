#include "rectikit/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace rectikit {

namespace {

constexpr std::string_view kCkptMagic = "RDIFCKPT";
constexpr std::string_view kPairMagic = "RDIFPAIR";
constexpr unsigned char kFormatVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "serializers assume a little-endian host");

void put_u32(std::string& out, std::uint32_t v) {
    char b[4];
    std::memcpy(b, &v, 4);
    out.append(b, 4);
}

void put_u64(std::string& out, std::uint64_t v) {
    char b[8];
    std::memcpy(b, &v, 8);
    out.append(b, 8);
}

void put_i32(std::string& out, std::int32_t v) { put_u32(out, static_cast<std::uint32_t>(v)); }

void put_f64(std::string& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

void put_str(std::string& out, std::string_view s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.append(s);
}

// Sequential reader with bounds checks; all failures are IoError.
class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}

    void expect_magic(std::string_view magic) {
        if (bytes_.size() < pos_ + magic.size() ||
            bytes_.substr(pos_, magic.size()) != magic) {
            throw IoError("bad magic; not a " + std::string(magic) + " file");
        }
        pos_ += magic.size();
    }

    unsigned char u8() {
        need(1);
        return static_cast<unsigned char>(bytes_[pos_++]);
    }

    std::uint32_t u32() {
        need(4);
        std::uint32_t v;
        std::memcpy(&v, bytes_.data() + pos_, 4);
        pos_ += 4;
        return v;
    }

    std::uint64_t u64() {
        need(8);
        std::uint64_t v;
        std::memcpy(&v, bytes_.data() + pos_, 8);
        pos_ += 8;
        return v;
    }

    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }

    double f64() {
        std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }

    std::string str() {
        std::uint32_t n = u32();
        need(n);
        std::string s(bytes_.substr(pos_, n));
        pos_ += n;
        return s;
    }

    void expect_end() const {
        if (pos_ != bytes_.size()) throw IoError("trailing bytes after payload");
    }

private:
    void need(std::size_t n) const {
        if (bytes_.size() - pos_ < n) throw IoError("truncated file");
    }

    std::string_view bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const DenoiserModel& m) {
    std::string out;
    out.reserve(64 + m.parameters.size() * 8);
    out.append(kCkptMagic);
    out.push_back(static_cast<char>(kFormatVersion));
    put_u32(out, static_cast<std::uint32_t>(m.data_dim));
    put_u32(out, static_cast<std::uint32_t>(m.num_conditions));
    put_u32(out, static_cast<std::uint32_t>(m.time_embed_dim));
    put_u32(out, static_cast<std::uint32_t>(m.cond_embed_dim));
    put_u32(out, static_cast<std::uint32_t>(m.hidden_widths.size()));
    for (int h : m.hidden_widths) put_u32(out, static_cast<std::uint32_t>(h));
    put_u64(out, m.parameters.size());
    for (double p : m.parameters) put_f64(out, p);
    return out;
}

DenoiserModel parse_checkpoint(std::string_view bytes) {
    Reader r(bytes);
    r.expect_magic(kCkptMagic);
    if (r.u8() != kFormatVersion) throw IoError("unsupported checkpoint version");
    DenoiserModel m;
    m.data_dim = static_cast<int>(r.u32());
    m.num_conditions = static_cast<int>(r.u32());
    m.time_embed_dim = static_cast<int>(r.u32());
    m.cond_embed_dim = static_cast<int>(r.u32());
    const std::uint32_t n_hidden = r.u32();
    m.hidden_widths.resize(n_hidden);
    for (auto& h : m.hidden_widths) h = static_cast<int>(r.u32());
    const std::uint64_t n_params = r.u64();
    m.validate_arch();
    if (n_params != m.param_count()) {
        throw IoError("checkpoint parameter count does not match its architecture");
    }
    m.parameters.resize(n_params);
    for (auto& p : m.parameters) p = r.f64();
    r.expect_end();
    return m;
}

void save_checkpoint(const std::filesystem::path& path, const DenoiserModel& m) {
    atomic_write_file(path, serialize_checkpoint(m));
}

DenoiserModel load_checkpoint(const std::filesystem::path& path) {
    return parse_checkpoint(read_file(path));
}

std::string serialize_pairs(const PairDataset& pairs) {
    std::string out;
    out.reserve(64 + pairs.records.size() * (4 + 16 * pairs.data_dim));
    out.append(kPairMagic);
    out.push_back(static_cast<char>(kFormatVersion));
    put_u32(out, static_cast<std::uint32_t>(pairs.data_dim));
    put_u64(out, pairs.records.size());
    put_u64(out, pairs.provenance.teacher_hash);
    put_str(out, pairs.provenance.solver);
    put_u32(out, static_cast<std::uint32_t>(pairs.provenance.solver_steps));
    put_f64(out, pairs.provenance.guidance_w);
    put_u64(out, pairs.provenance.seed);
    for (const PairRecord& rec : pairs.records) {
        put_i32(out, rec.condition);
        for (double v : rec.eps) put_f64(out, v);
        for (double v : rec.x0) put_f64(out, v);
    }
    return out;
}

PairDataset parse_pairs(std::string_view bytes) {
    Reader r(bytes);
    r.expect_magic(kPairMagic);
    if (r.u8() != kFormatVersion) throw IoError("unsupported pair-file version");
    PairDataset pairs;
    pairs.data_dim = static_cast<int>(r.u32());
    if (pairs.data_dim < 1) throw IoError("pair file with nonpositive dimension");
    const std::uint64_t n = r.u64();
    pairs.provenance.teacher_hash = r.u64();
    pairs.provenance.solver = r.str();
    pairs.provenance.solver_steps = static_cast<int>(r.u32());
    pairs.provenance.guidance_w = r.f64();
    pairs.provenance.seed = r.u64();
    pairs.records.resize(n);
    for (PairRecord& rec : pairs.records) {
        rec.condition = r.i32();
        rec.eps.resize(pairs.data_dim);
        for (auto& v : rec.eps) v = r.f64();
        rec.x0.resize(pairs.data_dim);
        for (auto& v : rec.x0) v = r.f64();
    }
    r.expect_end();
    return pairs;
}

void save_pairs(const std::filesystem::path& path, const PairDataset& pairs) {
    atomic_write_file(path, serialize_pairs(pairs));
}

PairDataset load_pairs(const std::filesystem::path& path) {
    return parse_pairs(read_file(path));
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t model_hash(const DenoiserModel& m) {
    return fnv1a64(serialize_checkpoint(m));
}

void atomic_write_file(const std::filesystem::path& path, std::string_view contents) {
    namespace fs = std::filesystem;
    std::error_code ec;
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        if (!out) throw IoError("short write to " + tmp.string());
    }
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failure on " + path.string());
    return bytes;
}

}  // namespace rectikit
