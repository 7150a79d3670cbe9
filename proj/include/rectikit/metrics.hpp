#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "rectikit/common.hpp"
#include "rectikit/data.hpp"
#include "rectikit/denoiser.hpp"
#include "rectikit/sampler.hpp"

namespace rectikit {

// Sample mean and covariance (unbiased) of a flat [n x 2] point set.
struct Gaussian2 {
    double mean[2] = {0.0, 0.0};
    double cov[3] = {0.0, 0.0, 0.0};  // xx, xy, yy
};
Gaussian2 fit_gaussian(std::span<const double> xy);

// 2-Wasserstein distance between Gaussian fits of the two point sets:
// sqrt(||m1 - m2||^2 + tr(C1) + tr(C2) - 2 tr((C1^1/2 C2 C1^1/2)^1/2)).
// The trace of the matrix square root is evaluated through the 2x2
// trace/determinant identities, so no eigensolver is involved. Each
// covariance gets 1e-10 * I of jitter against degenerate fits. Both sets
// need at least 3 points.
double frechet_gaussian(std::span<const double> gen_xy, std::span<const double> ref_xy);

// Fraction of points whose nearest Gauss8 mode matches the intended
// condition. Only defined for the Gauss8 benchmark.
double condition_fidelity(std::span<const double> xy, std::span<const int> intended,
                          DatasetKind kind = DatasetKind::Gauss8);

// Mean squared deviation of the per-step predictions from their trajectory
// mean; zero exactly when the model predicted the same eps at every step.
double prediction_drift(const Trajectory& traj);

// Mean Euclidean distance between the few-step and many-step endpoints over
// a fixed noise set, one condition per row.
double endpoint_gap(const DenoiserModel& m, const NoiseSchedule& sched,
                    std::span<const int> conds, double w, std::span<const double> noises,
                    int few, int many, ExecMode mode = ExecMode::Serial);
// Same with a single condition for the whole set.
double endpoint_gap(const DenoiserModel& m, const NoiseSchedule& sched, int cond, double w,
                    std::span<const double> noises, int few, int many,
                    ExecMode mode = ExecMode::Serial);

// One evaluation cell. cond_fidelity is absent for datasets without
// labelled modes; every present field is finite.
struct EvalReport {
    std::string model_id;
    int steps = 0;
    double guidance_w = 0.0;
    double frechet_gauss = 0.0;
    std::optional<double> cond_fidelity;
    double pred_drift = 0.0;
    double endpoint_gap = 0.0;
    long n_samples = 0;
    std::uint64_t seed = 0;
};

// CSV with exactly the columns
// model_id,steps,guidance_w,frechet_gauss,cond_fidelity,pred_drift,endpoint_gap,n_samples,seed
std::string eval_reports_csv(std::span<const EvalReport> reports);

}  // namespace rectikit
