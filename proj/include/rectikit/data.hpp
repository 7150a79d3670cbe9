#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "rectikit/common.hpp"

namespace rectikit {

// Built-in 2-D conditional benchmarks.
//   Gauss8:    8 tight Gaussians with means on the unit circle, one condition
//              per mode (the guidance / fidelity benchmark).
//   Spiral2:   two interleaved spirals, conditions 0 and 1.
//   StdNormal: a single standard normal, the analytic-oracle dataset.
enum class DatasetKind { Gauss8, Spiral2, StdNormal };

DatasetKind dataset_kind_from_string(const std::string& s);  // throws ConfigError
std::string to_string(DatasetKind kind);
int num_conditions_for(DatasetKind kind);

inline constexpr int kDataDim = 2;
inline constexpr double kGauss8Noise = 0.05;

struct SyntheticDataset {
    DatasetKind kind = DatasetKind::Gauss8;
    long n_samples = 0;
    std::uint64_t seed = 0;
    Vec x;                     // n_samples * kDataDim, row-major
    std::vector<int> cond;     // n_samples

    std::span<const double> sample(long i) const {
        return {x.data() + i * kDataDim, static_cast<std::size_t>(kDataDim)};
    }
};

// Deterministic per (kind, n, seed); conditions balanced to within one sample.
SyntheticDataset make_dataset(DatasetKind kind, long n_samples, std::uint64_t seed);

// Mean of condition c's mode for Gauss8: unit-circle point at angle 2*pi*c/8.
std::array<double, 2> mode_center(int c);

// Nearest Gauss8 mode, ties broken toward the smallest id. Only Gauss8 has
// labelled modes; other kinds throw std::invalid_argument.
int mode_assignment(std::span<const double> x, DatasetKind kind);

// CSV rows "x0,x1,c" with that exact header.
std::string dataset_csv(const SyntheticDataset& data);

}  // namespace rectikit
