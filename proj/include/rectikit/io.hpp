#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "rectikit/denoiser.hpp"
#include "rectikit/rectify.hpp"

namespace rectikit {

// Checkpoint container: magic "RDIFCKPT", version byte, little-endian
// integer architecture header, then the parameters as little-endian f64.
// serialize -> parse round-trips bit-exactly.
std::string serialize_checkpoint(const DenoiserModel& m);
DenoiserModel parse_checkpoint(std::string_view bytes);
void save_checkpoint(const std::filesystem::path& path, const DenoiserModel& m);
DenoiserModel load_checkpoint(const std::filesystem::path& path);

// Pair dataset container: magic "RDIFPAIR", version byte, header
// (data_dim, record count, provenance), then the records.
std::string serialize_pairs(const PairDataset& pairs);
PairDataset parse_pairs(std::string_view bytes);
void save_pairs(const std::filesystem::path& path, const PairDataset& pairs);
PairDataset load_pairs(const std::filesystem::path& path);

// FNV-1a over the serialized checkpoint; identifies a teacher in pair
// provenance and backs the immutability checks.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t model_hash(const DenoiserModel& m);

// Writes to <path>.tmp in the same directory, then renames over path, so a
// re-run never leaves a half-written file. Creates parent directories.
void atomic_write_file(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace rectikit
