#include "rectikit/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace rectikit {

namespace {

constexpr double kCovJitter = 1e-10;

double clamp_nonneg(double v) { return v > 0.0 ? v : 0.0; }

}  // namespace

Gaussian2 fit_gaussian(std::span<const double> xy) {
    if (xy.size() % kDataDim != 0) throw std::invalid_argument("fit_gaussian: ragged point set");
    const std::size_t n = xy.size() / kDataDim;
    if (n < kDataDim + 1) {
        throw std::invalid_argument("fit_gaussian: need at least 3 points");
    }
    Gaussian2 g;
    for (std::size_t i = 0; i < n; ++i) {
        g.mean[0] += xy[i * 2];
        g.mean[1] += xy[i * 2 + 1];
    }
    g.mean[0] /= static_cast<double>(n);
    g.mean[1] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xy[i * 2] - g.mean[0];
        const double dy = xy[i * 2 + 1] - g.mean[1];
        g.cov[0] += dx * dx;
        g.cov[1] += dx * dy;
        g.cov[2] += dy * dy;
    }
    const double denom = static_cast<double>(n - 1);
    g.cov[0] /= denom;
    g.cov[1] /= denom;
    g.cov[2] /= denom;
    return g;
}

double frechet_gaussian(std::span<const double> gen_xy, std::span<const double> ref_xy) {
    Gaussian2 a = fit_gaussian(gen_xy);
    Gaussian2 b = fit_gaussian(ref_xy);
    a.cov[0] += kCovJitter;
    a.cov[2] += kCovJitter;
    b.cov[0] += kCovJitter;
    b.cov[2] += kCovJitter;

    const double dm0 = a.mean[0] - b.mean[0];
    const double dm1 = a.mean[1] - b.mean[1];
    const double mean_term = dm0 * dm0 + dm1 * dm1;

    const double tr_a = a.cov[0] + a.cov[2];
    const double tr_b = b.cov[0] + b.cov[2];
    const double det_a = clamp_nonneg(a.cov[0] * a.cov[2] - a.cov[1] * a.cov[1]);
    const double det_b = clamp_nonneg(b.cov[0] * b.cov[2] - b.cov[1] * b.cov[1]);

    // tr((A^1/2 B A^1/2)^1/2) = sqrt(tr(AB) + 2 sqrt(det A det B)) for SPD 2x2,
    // via Cayley-Hamilton; tr(AB) = a_xx b_xx + 2 a_xy b_xy + a_yy b_yy.
    const double tr_ab = a.cov[0] * b.cov[0] + 2.0 * a.cov[1] * b.cov[1] + a.cov[2] * b.cov[2];
    const double tr_sqrt = std::sqrt(clamp_nonneg(tr_ab + 2.0 * std::sqrt(det_a * det_b)));

    return std::sqrt(clamp_nonneg(mean_term + tr_a + tr_b - 2.0 * tr_sqrt));
}

double condition_fidelity(std::span<const double> xy, std::span<const int> intended,
                          DatasetKind kind) {
    if (kind != DatasetKind::Gauss8) {
        throw std::invalid_argument("condition_fidelity: only defined on gauss8");
    }
    const std::size_t n = intended.size();
    if (n == 0 || xy.size() != n * kDataDim) {
        throw std::invalid_argument("condition_fidelity: shape mismatch");
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (mode_assignment({xy.data() + i * kDataDim, kDataDim}, kind) == intended[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(n);
}

double prediction_drift(const Trajectory& traj) {
    const std::size_t n = traj.eps_history.size();
    if (n < 2) throw std::invalid_argument("prediction_drift: need at least 2 predictions");
    const std::size_t dim = traj.eps_history.front().size();
    Vec mean(dim, 0.0);
    for (const Vec& e : traj.eps_history) {
        for (std::size_t d = 0; d < dim; ++d) mean[d] += e[d];
    }
    for (double& v : mean) v /= static_cast<double>(n);
    double acc = 0.0;
    for (const Vec& e : traj.eps_history) {
        for (std::size_t d = 0; d < dim; ++d) {
            const double r = e[d] - mean[d];
            acc += r * r;
        }
    }
    return acc / static_cast<double>(n);
}

double endpoint_gap(const DenoiserModel& m, const NoiseSchedule& sched,
                    std::span<const int> conds, double w, std::span<const double> noises,
                    int few, int many, ExecMode mode) {
    if (conds.empty()) throw std::invalid_argument("endpoint_gap: empty noise set");
    if (few > many) throw std::invalid_argument("endpoint_gap: few must be <= many");
    const std::size_t n = conds.size();
    const std::size_t dim = static_cast<std::size_t>(m.data_dim);
    Vec x_few(n * dim), x_many(n * dim);
    sample_many(m, sched, make_grid(sched, few), conds, w, noises, Solver::Ddim, mode, x_few);
    sample_many(m, sched, make_grid(sched, many), conds, w, noises, Solver::Ddim, mode, x_many);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double sq = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            const double r = x_few[i * dim + d] - x_many[i * dim + d];
            sq += r * r;
        }
        acc += std::sqrt(sq);
    }
    return acc / static_cast<double>(n);
}

double endpoint_gap(const DenoiserModel& m, const NoiseSchedule& sched, int cond, double w,
                    std::span<const double> noises, int few, int many, ExecMode mode) {
    const std::size_t n = noises.size() / static_cast<std::size_t>(m.data_dim);
    std::vector<int> conds(n, cond);
    return endpoint_gap(m, sched, conds, w, noises, few, many, mode);
}

std::string eval_reports_csv(std::span<const EvalReport> reports) {
    std::string out =
        "model_id,steps,guidance_w,frechet_gauss,cond_fidelity,pred_drift,endpoint_gap,"
        "n_samples,seed\n";
    char buf[256];
    for (const EvalReport& r : reports) {
        std::string fid;
        if (r.cond_fidelity.has_value()) {
            std::snprintf(buf, sizeof buf, "%.17g", *r.cond_fidelity);
            fid = buf;
        }
        std::snprintf(buf, sizeof buf, "%s,%d,%.17g,%.17g,%s,%.17g,%.17g,%ld,%llu\n",
                      r.model_id.c_str(), r.steps, r.guidance_w, r.frechet_gauss, fid.c_str(),
                      r.pred_drift, r.endpoint_gap, r.n_samples,
                      static_cast<unsigned long long>(r.seed));
        out += buf;
    }
    return out;
}

}  // namespace rectikit
