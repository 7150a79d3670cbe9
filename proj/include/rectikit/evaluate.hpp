#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rectikit/data.hpp"
#include "rectikit/denoiser.hpp"
#include "rectikit/metrics.hpp"
#include "rectikit/schedule.hpp"

namespace rectikit {

struct EvalSettings {
    std::vector<int> steps = {3, 5, 10, 25, 100, 200};
    std::vector<double> guidance = {1.0, 1.5, 2.5, 5.0, 7.5};
    long n_samples = 4096;
    std::uint64_t seed = 0;
    // drift is averaged over this many recorded trajectories, and the
    // endpoint gap over this many noises against the largest step count
    long probe_samples = 256;

    void validate() const;
};

struct NamedModel {
    std::string id;
    const DenoiserModel* model = nullptr;
};

// Full metric sweep: one EvalReport per (model, steps, guidance) cell, in
// that nesting order. All cells share one reference set, one noise set and
// one balanced condition assignment derived from settings.seed, so sweeps
// differ only through the solver configuration.
std::vector<EvalReport> run_evaluation(std::span<const NamedModel> models,
                                       const NoiseSchedule& sched, DatasetKind kind,
                                       const EvalSettings& settings,
                                       ExecMode mode = ExecMode::Parallel);

}  // namespace rectikit
