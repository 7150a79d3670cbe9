#include "rectikit/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rectikit/rng.hpp"
#include "rectikit/sampler.hpp"

namespace rectikit {

namespace {

// stream tags for deriving independent draws from one eval seed
constexpr std::uint64_t kRefStream = 0x5245, kNoiseStream = 0x4e4f;

}  // namespace

void EvalSettings::validate() const {
    if (steps.empty() || guidance.empty()) {
        throw ConfigError("eval: step and guidance lists must be nonempty");
    }
    for (int s : steps) {
        if (s < 1) throw ConfigError("eval: step counts must be >= 1");
    }
    if (n_samples < kDataDim + 1) throw ConfigError("eval: n_samples too small");
    if (probe_samples < 2) throw ConfigError("eval: probe_samples must be >= 2");
}

std::vector<EvalReport> run_evaluation(std::span<const NamedModel> models,
                                       const NoiseSchedule& sched, DatasetKind kind,
                                       const EvalSettings& settings, ExecMode mode) {
    settings.validate();
    if (models.empty()) throw std::invalid_argument("run_evaluation: no models");

    const long n = settings.n_samples;
    const int n_cond = num_conditions_for(kind);
    const SyntheticDataset ref = make_dataset(kind, n, mix_seed(settings.seed, kRefStream));

    Vec noises(n * kDataDim);
    Rng noise_rng(mix_seed(settings.seed, kNoiseStream));
    noise_rng.fill_normal(noises);
    std::vector<int> conds(n);
    for (long i = 0; i < n; ++i) conds[i] = static_cast<int>(i % n_cond);

    const long n_probe = std::min(settings.probe_samples, n);
    const int many = *std::max_element(settings.steps.begin(), settings.steps.end());
    std::span<const int> probe_conds{conds.data(), static_cast<std::size_t>(n_probe)};
    std::span<const double> probe_noises{noises.data(), static_cast<std::size_t>(n_probe * kDataDim)};

    std::vector<EvalReport> reports;
    reports.reserve(models.size() * settings.steps.size() * settings.guidance.size());

    for (const NamedModel& nm : models) {
        const DenoiserModel& model = *nm.model;
        if (model.num_conditions != n_cond) {
            throw std::invalid_argument("run_evaluation: model '" + nm.id +
                                        "' vocabulary does not match dataset");
        }
        for (double w : settings.guidance) {
            // many-step reference endpoints, shared by every cell of this (model, w)
            Vec probe_ref(n_probe * kDataDim);
            sample_many(model, sched, make_grid(sched, many), probe_conds, w, probe_noises,
                        Solver::Ddim, mode, probe_ref);

            for (int steps : settings.steps) {
                const TimeGrid grid = make_grid(sched, steps);
                Vec gen(n * kDataDim);
                std::vector<Trajectory> trajs;
                sample_many(model, sched, grid, conds, w, noises, Solver::Ddim, mode, gen,
                            steps >= 2 ? &trajs : nullptr, n_probe);

                EvalReport rep;
                rep.model_id = nm.id;
                rep.steps = steps;
                rep.guidance_w = w;
                rep.n_samples = n;
                rep.seed = settings.seed;
                rep.frechet_gauss = frechet_gaussian(gen, ref.x);
                if (kind == DatasetKind::Gauss8) {
                    rep.cond_fidelity = condition_fidelity(gen, conds, kind);
                }
                if (!trajs.empty()) {
                    double acc = 0.0;
                    for (const Trajectory& tr : trajs) acc += prediction_drift(tr);
                    rep.pred_drift = acc / static_cast<double>(trajs.size());
                }
                // the first n_probe generated rows reuse the probe noises, so
                // they are the few-step endpoints for the gap metric
                double gap = 0.0;
                if (steps != many) {
                    for (long i = 0; i < n_probe; ++i) {
                        double sq = 0.0;
                        for (int d = 0; d < kDataDim; ++d) {
                            const double r = gen[i * kDataDim + d] - probe_ref[i * kDataDim + d];
                            sq += r * r;
                        }
                        gap += std::sqrt(sq);
                    }
                    gap /= static_cast<double>(n_probe);
                }
                rep.endpoint_gap = gap;
                reports.push_back(std::move(rep));
            }
        }
    }
    return reports;
}

}  // namespace rectikit
