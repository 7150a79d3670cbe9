#pragma once

#include <utility>

namespace rectikit {

// Smallest time at which log-SNR quantities are evaluated; the log-SNR
// diverges at t = 0, so lambda-space grids stop here and the final solver
// step targets t = 0 directly.
inline constexpr double kTMinClip = 1e-5;

// Variance-preserving noise schedule with a linear instantaneous rate
// beta(t) = beta_min + t * (beta_max - beta_min) on t in [0, 1].
//
// alpha_t = exp(-0.5 * int_0^t beta), sigma_t = sqrt(1 - alpha_t^2), so
// alpha_t^2 + sigma_t^2 = 1 for all t. The log-SNR lambda_t = log(alpha/sigma)
// is strictly decreasing and invertible on [kTMinClip, 1].
struct NoiseSchedule {
    double beta_min = 0.1;
    double beta_max = 20.0;

    // Throws ConfigError unless 0 < beta_min < beta_max.
    void validate() const;

    double beta(double t) const;

    // (alpha_t, sigma_t); throws std::domain_error for t outside [0, 1].
    std::pair<double, double> alpha_sigma(double t) const;

    // log(alpha_t / sigma_t); throws std::domain_error for t outside (0, 1].
    double lambda_of_t(double t) const;

    // Inverse of lambda_of_t by bisection on [kTMinClip, 1], resolved to
    // 1e-12 in t. Throws std::range_error when lam is outside
    // [lambda_min(), lambda_max()].
    double t_of_lambda(double lam) const;

    // VP coefficients of the forward SDE dx = f_coeff * x dt + g dw:
    // f_coeff = -beta(t)/2, g = sqrt(beta(t)). Diagnostic only; the sampling
    // path works in (alpha, sigma) space.
    std::pair<double, double> drift_diffusion(double t) const;

    double lambda_min() const { return lambda_of_t(1.0); }
    double lambda_max() const { return lambda_of_t(kTMinClip); }
};

}  // namespace rectikit
