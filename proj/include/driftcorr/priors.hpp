#pragma once

// Gaussian prior terms over the per-epoch motion variables:
//   X1 angular motion (observed alpha), X2 magnitude (observed m),
//   X3 map distance (mean 0), X4 heading preservation (mean 0).
// Each contributes a weighted negative log-likelihood; gradients are
// analytic.  Normalization constants stay in the reported values so NLLs
// are comparable across sigma choices; they drop out of the gradients.

#include <array>
#include <cmath>
#include <stdexcept>

#include "driftcorr/geometry.hpp"

namespace driftcorr {

inline double nll_gaussian(double x, double mu, double sigma) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("nll_gaussian: sigma must be positive");
    const double r = x - mu;
    return r * r / (2.0 * sigma * sigma) + std::log(sigma * std::sqrt(2.0 * kPi));
}

inline double nll_gaussian_grad(double x, double mu, double sigma) {
    if (!(sigma > 0.0))
        throw std::invalid_argument("nll_gaussian_grad: sigma must be positive");
    return (x - mu) / (sigma * sigma);
}

// Wrapped difference a - b in [-pi, pi].  Angular residuals go through
// here before squaring so the objective stays 2*pi-periodic.
inline double angle_residual(double a, double b) { return wrap_angle(a - b); }

struct GaussianTerm {
    double mu = 0.0;
    double sigma = 1.0;
    double weight = 1.0;

    [[nodiscard]] double nll(double x) const { return nll_gaussian(x, mu, sigma); }
    [[nodiscard]] double grad(double x) const { return nll_gaussian_grad(x, mu, sigma); }
};

// Per-term standard deviations and weights.  A weight of exactly 0
// disables the term.  The magnitude sigma is scale-proportional:
// sigma2_eff = sigma2 + sigma2_scale * m_obs, so short steps are trusted
// on an absolute floor and long steps proportionally.
//
// The defaults balance the angular observation against the map pull: a
// heading-rate bias b settles at a lateral offset b*(w1/sigma1^2)/(w3/sigma3^2)
// with overshoot up to twice that, which must stay inside d_max; and
// sigma4 is kept soft so the smoothness prior only nudges genuine turns
// (a stiff X4 visibly under-turns sharp corners).
struct PriorParams {
    double sigma1 = 0.1;        // rad, angular motion
    double sigma2 = 0.01;       // m, magnitude floor
    double sigma2_scale = 0.1;  // per meter of observed magnitude
    double sigma3 = 3.0;        // m, map distance
    double sigma4 = 0.5;        // rad, heading preservation
    double w1 = 1.0;
    double w2 = 1.0;
    double w3 = 0.8;
    double w4 = 0.5;

    [[nodiscard]] double effective_sigma2(double m_obs) const {
        return sigma2 + sigma2_scale * m_obs;
    }
};

inline void validate_params(const PriorParams& p) {
    if (!(p.sigma1 > 0.0) || !(p.sigma2 > 0.0) || !(p.sigma3 > 0.0) || !(p.sigma4 > 0.0))
        throw std::invalid_argument("prior params: sigmas must be positive");
    if (p.sigma2_scale < 0.0)
        throw std::invalid_argument("prior params: sigma2_scale must be non-negative");
    for (double w : {p.w1, p.w2, p.w3, p.w4})
        if (!(w >= 0.0 && w <= 1.0))
            throw std::invalid_argument("prior params: weights must lie in [0, 1]");
}

}  // namespace driftcorr
