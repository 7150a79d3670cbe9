#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "rectikit/common.hpp"
#include "rectikit/data.hpp"
#include "rectikit/denoiser.hpp"
#include "rectikit/sampler.hpp"
#include "rectikit/schedule.hpp"

namespace rectikit {

struct TrainConfig {
    long iterations = 20000;
    int batch_size = 128;
    double lr = 1e-3;
    double cond_dropout = 0.1;  // fraction of rows trained with the null condition
    double weight_decay = 0.0;
    std::uint64_t seed = 0;

    void validate() const;
};

// Test/CLI instrumentation. on_batch sees every assembled batch together
// with the dataset (or pair) row each batch entry came from.
struct TrainHooks {
    std::function<void(long iter, double loss)> on_loss;
    std::function<void(long iter, const TrainBatch& batch, std::span<const long> source_rows)> on_batch;
};

// Standard denoiser training on randomly coupled noise: per batch row draw a
// data sample, t uniform on [kTMinClip, 1] and fresh eps, form
// x_t = alpha_t x0 + sigma_t eps and regress the model output on eps.
// Parameters are initialized from config.seed, so (dataset, config) fully
// determine the result in Serial mode.
DenoiserModel train_teacher(const SyntheticDataset& data, const NoiseSchedule& sched,
                            const DenoiserModel& arch, const TrainConfig& config,
                            ExecMode mode = ExecMode::Serial, const TrainHooks* hooks = nullptr);

// One noise/sample pair produced by a teacher solve: x0 is the endpoint the
// solver reached starting from exactly this eps.
struct PairRecord {
    int condition = 0;
    Vec eps;
    Vec x0;
};

struct PairProvenance {
    std::uint64_t teacher_hash = 0;
    std::string solver = "ddim";
    int solver_steps = 0;
    double guidance_w = 0.0;
    std::uint64_t seed = 0;
};

struct PairDataset {
    int data_dim = kDataDim;
    PairProvenance provenance;
    std::vector<PairRecord> records;
};

// Draws (condition, eps) streams from the seed, solves each one with the
// teacher and stores the deterministic couple. Conditions are uniform over
// the teacher's vocabulary. Records with a non-finite endpoint are dropped
// (logged to stderr); more than 1% dropped raises NumericalError. Rows are
// independent, so Serial and Parallel runs produce identical datasets.
PairDataset generate_pairs(const DenoiserModel& teacher, const NoiseSchedule& sched,
                           long n_pairs, int solver_steps, double guidance_w,
                           std::uint64_t seed, ExecMode mode = ExecMode::Parallel);

// Retrains a copy of the teacher on the deterministic coupling: per batch
// row pick a pair record, sample t, form x_t = alpha_t x0 + sigma_t eps from
// the record's own eps and regress on that same eps. Condition dropout as in
// teacher training. config.iterations = 0 returns the teacher verbatim.
DenoiserModel rectify_student(const DenoiserModel& teacher, const PairDataset& pairs,
                              const NoiseSchedule& sched, const TrainConfig& config,
                              ExecMode mode = ExecMode::Serial, const TrainHooks* hooks = nullptr);

}  // namespace rectikit
