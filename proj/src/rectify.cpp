#include "rectikit/rectify.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "rectikit/io.hpp"
#include "rectikit/rng.hpp"

namespace rectikit {

namespace {

// One gradient step on an assembled batch; shared by both training loops.
void optimize_step(DenoiserModel& model, const TrainBatch& batch, const TrainConfig& config,
                   AdamState& opt, ExecMode mode, long iter, const TrainHooks* hooks,
                   std::span<const long> source_rows) {
    if (hooks != nullptr && hooks->on_batch) hooks->on_batch(iter, batch, source_rows);
    GradientBundle g = loss_and_grad(model, batch, mode);
    if (!std::isfinite(g.loss)) {
        throw NumericalError("training diverged: non-finite loss at iteration " +
                             std::to_string(iter));
    }
    adamw_step(model, g, config.lr, opt);
    if (hooks != nullptr && hooks->on_loss) hooks->on_loss(iter, g.loss);
}

}  // namespace

void TrainConfig::validate() const {
    if (iterations < 0) throw ConfigError("train: iterations must be >= 0");
    if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
    if (!(lr > 0.0)) throw ConfigError("train: lr must be positive");
    if (!(cond_dropout >= 0.0 && cond_dropout < 1.0)) {
        throw ConfigError("train: cond_dropout must lie in [0, 1)");
    }
    if (weight_decay < 0.0) throw ConfigError("train: weight_decay must be >= 0");
}

DenoiserModel train_teacher(const SyntheticDataset& data, const NoiseSchedule& sched,
                            const DenoiserModel& arch, const TrainConfig& config,
                            ExecMode mode, const TrainHooks* hooks) {
    config.validate();
    if (data.n_samples < 1) throw std::invalid_argument("train_teacher: empty dataset");
    if (arch.num_conditions != num_conditions_for(data.kind)) {
        throw std::invalid_argument("train_teacher: model vocabulary does not match dataset");
    }
    if (arch.data_dim != kDataDim) {
        throw std::invalid_argument("train_teacher: model dimensionality does not match dataset");
    }

    DenoiserModel model = arch;
    Rng rng(config.seed);
    init_params(model, rng);

    AdamState opt(model.parameters.size(), AdamConfig{.weight_decay = config.weight_decay});
    const int bs = config.batch_size;
    TrainBatch batch;
    batch.resize(bs, model.data_dim);
    std::vector<long> rows(bs);

    for (long iter = 0; iter < config.iterations; ++iter) {
        // per row: sample index, t, eps, dropout coin -- in that order
        for (int b = 0; b < bs; ++b) {
            const long idx = rng.uniform_int(data.n_samples);
            rows[b] = idx;
            const double t = rng.uniform(kTMinClip, 1.0);
            auto [alpha, sigma] = sched.alpha_sigma(t);
            const double* x0 = data.x.data() + idx * kDataDim;
            double* xt = batch.x.data() + b * kDataDim;
            double* target = batch.eps_target.data() + b * kDataDim;
            for (int d = 0; d < kDataDim; ++d) {
                const double eps = rng.normal();
                target[d] = eps;
                xt[d] = alpha * x0[d] + sigma * eps;
            }
            batch.t[b] = t;
            const bool drop = rng.uniform() < config.cond_dropout;
            batch.cond[b] = drop ? kNullCondition : data.cond[idx];
        }
        optimize_step(model, batch, config, opt, mode, iter, hooks, rows);
    }
    return model;
}

PairDataset generate_pairs(const DenoiserModel& teacher, const NoiseSchedule& sched,
                           long n_pairs, int solver_steps, double guidance_w,
                           std::uint64_t seed, ExecMode mode) {
    if (n_pairs < 1) throw std::invalid_argument("generate_pairs: n_pairs must be >= 1");
    if (solver_steps < 1) throw std::invalid_argument("generate_pairs: solver_steps must be >= 1");
    if (teacher.parameters.empty()) throw std::invalid_argument("generate_pairs: untrained teacher");

    const int dim = teacher.data_dim;
    std::vector<int> conds(n_pairs);
    Vec noises(n_pairs * dim);
    Rng rng(seed);
    for (long i = 0; i < n_pairs; ++i) {
        conds[i] = static_cast<int>(rng.uniform_int(teacher.num_conditions));
        rng.fill_normal({noises.data() + i * dim, static_cast<std::size_t>(dim)});
    }

    const TimeGrid grid = make_grid(sched, solver_steps, GridScheme::UniformT);
    Vec endpoints(n_pairs * dim);
    sample_many(teacher, sched, grid, conds, guidance_w, noises, Solver::Ddim, mode, endpoints);

    PairDataset pairs;
    pairs.data_dim = dim;
    pairs.provenance = PairProvenance{
        .teacher_hash = model_hash(teacher),
        .solver = "ddim",
        .solver_steps = solver_steps,
        .guidance_w = guidance_w,
        .seed = seed,
    };
    pairs.records.reserve(n_pairs);
    long rejected = 0;
    for (long i = 0; i < n_pairs; ++i) {
        std::span<const double> x0{endpoints.data() + i * dim, static_cast<std::size_t>(dim)};
        if (!all_finite(x0)) {
            ++rejected;
            std::fprintf(stderr, "generate_pairs: rejected record %ld (non-finite endpoint)\n", i);
            continue;
        }
        PairRecord rec;
        rec.condition = conds[i];
        rec.eps.assign(noises.begin() + i * dim, noises.begin() + (i + 1) * dim);
        rec.x0.assign(x0.begin(), x0.end());
        pairs.records.push_back(std::move(rec));
    }
    if (rejected * 100 > n_pairs) {
        throw NumericalError("generate_pairs: " + std::to_string(rejected) + " of " +
                             std::to_string(n_pairs) + " records rejected (> 1%)");
    }
    return pairs;
}

DenoiserModel rectify_student(const DenoiserModel& teacher, const PairDataset& pairs,
                              const NoiseSchedule& sched, const TrainConfig& config,
                              ExecMode mode, const TrainHooks* hooks) {
    config.validate();
    if (pairs.records.empty()) throw std::invalid_argument("rectify_student: empty pair dataset");
    if (pairs.data_dim != teacher.data_dim) {
        throw std::invalid_argument("rectify_student: pair dimensionality mismatch");
    }

    DenoiserModel student = teacher;  // exact parameter copy
    Rng rng(config.seed);

    AdamState opt(student.parameters.size(), AdamConfig{.weight_decay = config.weight_decay});
    const int bs = config.batch_size;
    const long n = static_cast<long>(pairs.records.size());
    TrainBatch batch;
    batch.resize(bs, student.data_dim);
    std::vector<long> rows(bs);

    const int dim = student.data_dim;
    for (long iter = 0; iter < config.iterations; ++iter) {
        // per row: record index, t, dropout coin; eps comes from the record
        for (int b = 0; b < bs; ++b) {
            const long idx = rng.uniform_int(n);
            rows[b] = idx;
            const PairRecord& rec = pairs.records[idx];
            const double t = rng.uniform(kTMinClip, 1.0);
            auto [alpha, sigma] = sched.alpha_sigma(t);
            double* xt = batch.x.data() + b * dim;
            double* target = batch.eps_target.data() + b * dim;
            for (int d = 0; d < dim; ++d) {
                target[d] = rec.eps[d];
                xt[d] = alpha * rec.x0[d] + sigma * rec.eps[d];
            }
            batch.t[b] = t;
            const bool drop = rng.uniform() < config.cond_dropout;
            batch.cond[b] = drop ? kNullCondition : rec.condition;
        }
        optimize_step(student, batch, config, opt, mode, iter, hooks, rows);
    }
    return student;
}

}  // namespace rectikit
