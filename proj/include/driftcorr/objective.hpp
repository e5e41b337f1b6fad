#pragma once

// Joint weighted negative log-likelihood of all four prior terms over a
// candidate epoch position, with the analytic gradient in world
// coordinates.  The optimization variable is the position p itself; the
// candidate's polar form (alpha, m) relative to the previous corrected
// state provides the chain rule:
//   d(alpha)/dp = (-sin th, cos th) / m,   d(m)/dp = (cos th, sin th)
// with th the candidate's absolute motion direction.

#include <array>
#include <cmath>

#include "driftcorr/geometry.hpp"
#include "driftcorr/priors.hpp"
#include "driftcorr/worldmap.hpp"

namespace driftcorr {

// Below this step length the candidate direction is undefined and the
// rotational terms contribute constants only.
inline constexpr double kMinStepLength = 1e-6;

struct EpochObservation {
    double alpha_obs = 0.0;  // radians in [-pi, pi]
    double m_obs = 0.0;      // meters, >= 0
};

struct EpochContext {
    Point2 p_prev;               // corrected position at t-1
    double heading_prev = 0.0;   // corrected motion direction at t-1
};

struct CandidatePolar {
    double alpha = 0.0;
    double m = 0.0;
    bool alpha_defined = false;
};

struct CandidateEval {
    double nll = 0.0;
    Point2 grad;                          // d(nll)/d(x,y), nats per meter
    std::array<double, 4> term_values{};  // unweighted X1..X4 NLLs
};

// Polar form of the candidate step p - p_prev.  Steps shorter than
// kMinStepLength have no usable direction; alpha_defined is cleared and
// alpha reported as 0.
inline CandidatePolar candidate_polar(Point2 p, const EpochContext& ctx) {
    CandidatePolar out;
    const Point2 d = p - ctx.p_prev;
    out.m = norm(d);
    if (out.m < kMinStepLength)
        return out;
    out.alpha = angle_residual(std::atan2(d.y, d.x), ctx.heading_prev);
    out.alpha_defined = true;
    return out;
}

inline CandidateEval joint_nll(Point2 p, const EpochContext& ctx,
                               const EpochObservation& obs, const DistanceField& field,
                               const PriorParams& params) {
    const CandidatePolar cp = candidate_polar(p, ctx);

    // candidate absolute direction; falls back to the previous heading at
    // the m -> 0 singularity
    const Point2 d = p - ctx.p_prev;
    const double theta =
        cp.alpha_defined ? std::atan2(d.y, d.x) : ctx.heading_prev;
    const double cos_t = std::cos(theta);
    const double sin_t = std::sin(theta);
    const double inv_m = 1.0 / std::max(cp.m, kMinStepLength);
    const Point2 dalpha_dp{-sin_t * inv_m, cos_t * inv_m};
    const Point2 dm_dp{cos_t, sin_t};

    const double sigma2 = params.effective_sigma2(obs.m_obs);
    const double dist = sample_bilinear(field, p);
    const Point2 ddist_dp = gradient_bilinear(field, p);

    CandidateEval eval;
    Point2 g{0.0, 0.0};

    // X1: angular motion vs observation
    if (cp.alpha_defined) {
        const double r1 = angle_residual(cp.alpha, obs.alpha_obs);
        eval.term_values[0] = nll_gaussian(r1, 0.0, params.sigma1);
        const double g1 = nll_gaussian_grad(r1, 0.0, params.sigma1);
        g = g + params.w1 * (g1 * dalpha_dp);
    } else {
        eval.term_values[0] = nll_gaussian(0.0, 0.0, params.sigma1);
    }

    // X2: magnitude vs observation
    eval.term_values[1] = nll_gaussian(cp.m, obs.m_obs, sigma2);
    g = g + params.w2 * (nll_gaussian_grad(cp.m, obs.m_obs, sigma2) * dm_dp);

    // X3: map distance pulled toward 0
    eval.term_values[2] = nll_gaussian(dist, 0.0, params.sigma3);
    g = g + params.w3 * (nll_gaussian_grad(dist, 0.0, params.sigma3) * ddist_dp);

    // X4: heading preservation, candidate's own direction change vs 0
    if (cp.alpha_defined) {
        eval.term_values[3] = nll_gaussian(cp.alpha, 0.0, params.sigma4);
        g = g + params.w4 * (nll_gaussian_grad(cp.alpha, 0.0, params.sigma4) * dalpha_dp);
    } else {
        eval.term_values[3] = nll_gaussian(0.0, 0.0, params.sigma4);
    }

    eval.nll = params.w1 * eval.term_values[0] + params.w2 * eval.term_values[1] +
               params.w3 * eval.term_values[2] + params.w4 * eval.term_values[3];
    eval.grad = g;
    return eval;
}

}  // namespace driftcorr
