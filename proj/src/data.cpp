#include "rectikit/data.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "rectikit/rng.hpp"

namespace rectikit {

DatasetKind dataset_kind_from_string(const std::string& s) {
    if (s == "gauss8") return DatasetKind::Gauss8;
    if (s == "spiral2") return DatasetKind::Spiral2;
    if (s == "stdnormal") return DatasetKind::StdNormal;
    throw ConfigError("unknown dataset kind: " + s);
}

std::string to_string(DatasetKind kind) {
    switch (kind) {
        case DatasetKind::Gauss8: return "gauss8";
        case DatasetKind::Spiral2: return "spiral2";
        case DatasetKind::StdNormal: return "stdnormal";
    }
    return "?";
}

int num_conditions_for(DatasetKind kind) {
    switch (kind) {
        case DatasetKind::Gauss8: return 8;
        case DatasetKind::Spiral2: return 2;
        case DatasetKind::StdNormal: return 1;
    }
    return 1;
}

std::array<double, 2> mode_center(int c) {
    const double angle = 2.0 * std::numbers::pi * c / 8.0;
    return {std::cos(angle), std::sin(angle)};
}

SyntheticDataset make_dataset(DatasetKind kind, long n_samples, std::uint64_t seed) {
    if (n_samples < 1) throw std::invalid_argument("make_dataset: n_samples must be >= 1");
    SyntheticDataset data;
    data.kind = kind;
    data.n_samples = n_samples;
    data.seed = seed;
    data.x.resize(n_samples * kDataDim);
    data.cond.resize(n_samples);

    Rng rng(seed);
    const int n_cond = num_conditions_for(kind);
    for (long i = 0; i < n_samples; ++i) {
        const int c = static_cast<int>(i % n_cond);  // balanced to within one
        data.cond[i] = c;
        double* row = data.x.data() + i * kDataDim;
        switch (kind) {
            case DatasetKind::Gauss8: {
                auto mu = mode_center(c);
                row[0] = mu[0] + kGauss8Noise * rng.normal();
                row[1] = mu[1] + kGauss8Noise * rng.normal();
                break;
            }
            case DatasetKind::Spiral2: {
                // arm c is arm 0 rotated by pi; radius grows along the turn
                const double u = rng.uniform();
                const double phi = 3.0 * std::numbers::pi * u + std::numbers::pi * c;
                const double radius = 0.25 + 0.75 * u + kGauss8Noise * rng.normal();
                row[0] = radius * std::cos(phi);
                row[1] = radius * std::sin(phi);
                break;
            }
            case DatasetKind::StdNormal: {
                row[0] = rng.normal();
                row[1] = rng.normal();
                break;
            }
        }
    }
    return data;
}

int mode_assignment(std::span<const double> x, DatasetKind kind) {
    if (kind != DatasetKind::Gauss8) {
        throw std::invalid_argument("mode_assignment: only gauss8 has labelled modes");
    }
    if (x.size() != kDataDim) {
        throw std::invalid_argument("mode_assignment: expected a 2-D point");
    }
    int best = 0;
    double best_d2 = 0.0;
    for (int c = 0; c < 8; ++c) {
        auto mu = mode_center(c);
        const double dx = x[0] - mu[0];
        const double dy = x[1] - mu[1];
        const double d2 = dx * dx + dy * dy;
        if (c == 0 || d2 < best_d2) {  // strict < keeps the smallest id on ties
            best = c;
            best_d2 = d2;
        }
    }
    return best;
}

std::string dataset_csv(const SyntheticDataset& data) {
    std::string out = "x0,x1,c\n";
    char buf[80];
    for (long i = 0; i < data.n_samples; ++i) {
        const double* row = data.x.data() + i * kDataDim;
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", row[0], row[1], data.cond[i]);
        out += buf;
    }
    return out;
}

}  // namespace rectikit
