#include "rectikit/sampler.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rectikit {

namespace {

void check_step_times(double s, double t) {
    if (!(s > t)) {
        throw std::invalid_argument("solver step requires t < s, got s = " + std::to_string(s) +
                                    ", t = " + std::to_string(t));
    }
    if (!(s <= 1.0) || !(t >= 0.0)) {
        throw std::invalid_argument("solver step times must lie in [0, 1]");
    }
}

// Shared solver loop; ws holds the current state and is advanced in place.
void run_solver(EpsSource& src, const NoiseSchedule& sched, const TimeGrid& grid,
                int cond, double w, Solver solver, Vec& x, Vec& eps, Vec& scratch,
                Trajectory* traj) {
    const int n = grid.steps();
    if (traj != nullptr) {
        traj->times = grid.times;
        traj->states.clear();
        traj->eps_history.clear();
        traj->states.push_back(x);
    }
    for (int i = 0; i < n; ++i) {
        const double s = grid.times[i];
        const double t = grid.times[i + 1];
        guided_eps(src, x, s, cond, w, eps, scratch);
        x = solver == Solver::Ddim ? ddim_step(sched, x, s, t, eps)
                                   : euler_step(sched, x, s, t, eps);
        if (traj != nullptr) {
            traj->states.push_back(x);
            traj->eps_history.push_back(eps);
        }
    }
}

}  // namespace

TimeGrid make_grid(const NoiseSchedule& sched, int steps, GridScheme scheme) {
    if (steps < 1) throw std::invalid_argument("make_grid: steps must be >= 1");
    TimeGrid grid;
    grid.times.resize(steps + 1);
    grid.times.front() = 1.0;
    grid.times.back() = 0.0;
    if (scheme == GridScheme::UniformT) {
        for (int i = 1; i < steps; ++i) {
            grid.times[i] = 1.0 - static_cast<double>(i) / steps;
        }
    } else {
        const double lam_start = sched.lambda_of_t(1.0);
        const double lam_end = sched.lambda_of_t(kTMinClip);
        for (int i = 1; i < steps; ++i) {
            double lam = lam_start + (lam_end - lam_start) * static_cast<double>(i) / steps;
            grid.times[i] = sched.t_of_lambda(lam);
        }
    }
    return grid;
}

Vec ddim_step(const NoiseSchedule& sched, std::span<const double> x_s, double s, double t,
              std::span<const double> eps_hat) {
    check_step_times(s, t);
    if (x_s.size() != eps_hat.size()) {
        throw std::invalid_argument("ddim_step: x and eps_hat length mismatch");
    }
    auto [alpha_s, sigma_s] = sched.alpha_sigma(s);
    auto [alpha_t, sigma_t] = sched.alpha_sigma(t);
    const double scale = alpha_t / alpha_s;
    const double coef = alpha_t * (sigma_s / alpha_s - sigma_t / alpha_t);
    Vec x_t(x_s.size());
    for (std::size_t i = 0; i < x_s.size(); ++i) {
        x_t[i] = scale * x_s[i] - coef * eps_hat[i];
    }
    return x_t;
}

Vec euler_step(const NoiseSchedule& sched, std::span<const double> x_s, double s, double t,
               std::span<const double> eps_hat) {
    check_step_times(s, t);
    if (x_s.size() != eps_hat.size()) {
        throw std::invalid_argument("euler_step: x and eps_hat length mismatch");
    }
    if (s < kTMinClip) {
        throw std::invalid_argument("euler_step: s below the sigma > 0 clip");
    }
    auto [f_coeff, g] = sched.drift_diffusion(s);
    auto [alpha_s, sigma_s] = sched.alpha_sigma(s);
    const double dt = t - s;
    const double eps_coef = g * g / (2.0 * sigma_s);
    Vec x_t(x_s.size());
    for (std::size_t i = 0; i < x_s.size(); ++i) {
        x_t[i] = x_s[i] + dt * (f_coeff * x_s[i] + eps_coef * eps_hat[i]);
    }
    return x_t;
}

void guided_eps(EpsSource& src, std::span<const double> x, double t, int cond, double w,
                std::span<double> out, Vec& scratch) {
    if (cond == kNullCondition) {
        throw std::invalid_argument("guided_eps: condition must be a real id, not null");
    }
    if (w == 1.0) {
        src.predict(x, t, cond, out);
        return;
    }
    scratch.resize(x.size());
    src.predict(x, t, kNullCondition, scratch);
    src.predict(x, t, cond, out);
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = (1.0 - w) * scratch[i] + w * out[i];
    }
}

Vec guided_eps(const DenoiserModel& m, std::span<const double> x, double t, int cond, double w) {
    ModelEpsSource src(m);
    Vec out(x.size(), 0.0);
    Vec scratch;
    guided_eps(src, x, t, cond, w, out, scratch);
    return out;
}

SampleResult sample(EpsSource& src, const NoiseSchedule& sched, const TimeGrid& grid,
                    int cond, double w, std::span<const double> noise,
                    Solver solver, bool record) {
    if (static_cast<int>(noise.size()) != src.dim()) {
        throw std::invalid_argument("sample: noise length does not match model dimension");
    }
    SampleResult res;
    res.x0.assign(noise.begin(), noise.end());
    Vec eps(noise.size()), scratch;
    Trajectory traj;
    run_solver(src, sched, grid, cond, w, solver, res.x0, eps, scratch,
               record ? &traj : nullptr);
    if (record) res.trajectory = std::move(traj);
    return res;
}

SampleResult sample(const DenoiserModel& m, const NoiseSchedule& sched, const TimeGrid& grid,
                    int cond, double w, std::span<const double> noise,
                    Solver solver, bool record) {
    ModelEpsSource src(m);
    return sample(src, sched, grid, cond, w, noise, solver, record);
}

void sample_many(const EpsSource& proto, const NoiseSchedule& sched, const TimeGrid& grid,
                 std::span<const int> conds, double w, std::span<const double> noises,
                 Solver solver, ExecMode mode, std::span<double> out_x0,
                 std::vector<Trajectory>* trajectories, std::size_t record_count) {
    const std::size_t n = conds.size();
    const std::size_t dim = static_cast<std::size_t>(proto.dim());
    if (noises.size() != n * dim || out_x0.size() != n * dim) {
        throw std::invalid_argument("sample_many: buffer sizes do not match n * dim");
    }
    if (trajectories != nullptr) {
        record_count = std::min(record_count, n);
        trajectories->assign(record_count, Trajectory{});
    } else {
        record_count = 0;
    }

    const int workers = mode == ExecMode::Parallel ? worker_count() : 1;
#pragma omp parallel num_threads(workers) if (workers > 1)
    {
        std::unique_ptr<EpsSource> src = proto.clone();
        Vec x(dim), eps(dim), scratch;
#pragma omp for schedule(static)
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t d = 0; d < dim; ++d) x[d] = noises[i * dim + d];
            Trajectory* traj = i < record_count ? &(*trajectories)[i] : nullptr;
            run_solver(*src, sched, grid, conds[i], w, solver, x, eps, scratch, traj);
            for (std::size_t d = 0; d < dim; ++d) out_x0[i * dim + d] = x[d];
        }
    }
}

void sample_many(const DenoiserModel& m, const NoiseSchedule& sched, const TimeGrid& grid,
                 std::span<const int> conds, double w, std::span<const double> noises,
                 Solver solver, ExecMode mode, std::span<double> out_x0,
                 std::vector<Trajectory>* trajectories, std::size_t record_count) {
    ModelEpsSource proto(m);
    sample_many(proto, sched, grid, conds, w, noises, solver, mode, out_x0,
                trajectories, record_count);
}

}  // namespace rectikit
