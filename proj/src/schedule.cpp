#include "rectikit/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rectikit/common.hpp"

namespace rectikit {

namespace {

void check_time(double t, double lo, const char* who) {
    if (!(t >= lo && t <= 1.0)) {
        throw std::domain_error(std::string(who) + ": t = " + std::to_string(t) +
                                " outside [" + std::to_string(lo) + ", 1]");
    }
}

}  // namespace

void NoiseSchedule::validate() const {
    if (!(beta_min > 0.0) || !(beta_max > beta_min)) {
        throw ConfigError("noise schedule requires 0 < beta_min < beta_max");
    }
}

double NoiseSchedule::beta(double t) const {
    return beta_min + t * (beta_max - beta_min);
}

std::pair<double, double> NoiseSchedule::alpha_sigma(double t) const {
    check_time(t, 0.0, "alpha_sigma");
    // int_0^t beta(u) du for the linear rate, in closed form.
    double integral = beta_min * t + 0.5 * (beta_max - beta_min) * t * t;
    double alpha = std::exp(-0.5 * integral);
    // 1 - alpha^2 = -expm1(-integral); expm1 keeps sigma accurate near t = 0.
    double sigma = std::sqrt(-std::expm1(-integral));
    return {alpha, sigma};
}

double NoiseSchedule::lambda_of_t(double t) const {
    if (t == 0.0) {
        throw std::domain_error("lambda_of_t: log-SNR is infinite at t = 0");
    }
    check_time(t, 0.0, "lambda_of_t");
    auto [alpha, sigma] = alpha_sigma(t);
    return std::log(alpha / sigma);
}

double NoiseSchedule::t_of_lambda(double lam) const {
    const double lam_lo = lambda_min();
    const double lam_hi = lambda_max();
    const double slack = 1e-9;
    if (!(lam >= lam_lo - slack && lam <= lam_hi + slack)) {
        throw std::range_error("t_of_lambda: lambda = " + std::to_string(lam) +
                               " outside [" + std::to_string(lam_lo) + ", " +
                               std::to_string(lam_hi) + "]");
    }
    // lambda is strictly decreasing in t, so bisect.
    double lo = kTMinClip;
    double hi = 1.0;
    while (hi - lo > 1e-12) {
        double mid = 0.5 * (lo + hi);
        if (lambda_of_t(mid) > lam) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

std::pair<double, double> NoiseSchedule::drift_diffusion(double t) const {
    check_time(t, 0.0, "drift_diffusion");
    double b = beta(t);
    return {-0.5 * b, std::sqrt(b)};
}

}  // namespace rectikit
