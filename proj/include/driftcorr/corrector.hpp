#pragma once

// Per-epoch mode seeking and full-trajectory recursive correction.
//
// Each epoch minimizes the joint NLL over the candidate position with
// safeguarded gradient descent: a step is accepted only if it strictly
// decreases the objective, otherwise the step length is backed off.  The
// corrected position then becomes the next epoch's context, so the whole
// trajectory chains in the corrected frame.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "driftcorr/geometry.hpp"
#include "driftcorr/objective.hpp"

namespace driftcorr {

struct SolverConfig {
    double learning_rate = 0.01;
    int max_iters = 500;
    double grad_tol = 1e-6;       // nats per meter
    double step_tol = 1e-6;       // meters
    double backtrack_factor = 0.5;
    int max_backtracks = 20;
    // Anchors the candidate alpha to the dead-reckoned SLAM heading instead
    // of the corrected heading; kept for ablation runs.
    bool anchor_alpha_to_slam = false;
};

inline void validate_config(const SolverConfig& cfg) {
    if (!(cfg.learning_rate > 0.0))
        throw std::invalid_argument("solver config: learning_rate must be positive");
    if (cfg.max_iters < 1)
        throw std::invalid_argument("solver config: max_iters must be at least 1");
    if (!(cfg.grad_tol > 0.0) || !(cfg.step_tol > 0.0))
        throw std::invalid_argument("solver config: tolerances must be positive");
    if (!(cfg.backtrack_factor > 0.0 && cfg.backtrack_factor < 1.0))
        throw std::invalid_argument("solver config: backtrack_factor must lie in (0, 1)");
    if (cfg.max_backtracks < 0)
        throw std::invalid_argument("solver config: max_backtracks must be non-negative");
}

struct EpochSolve {
    Point2 p_star;
    double nll_initial = 0.0;
    double nll_final = 0.0;
    int iterations = 0;
    bool converged = false;
    bool backtrack_exhausted = false;
};

// Safeguarded gradient descent from init_guess.  Guarantees
// nll_final <= nll_initial; converged means the gradient or the accepted
// step fell below its tolerance.
inline EpochSolve solve_epoch(Point2 init_guess, const EpochContext& ctx,
                              const EpochObservation& obs, const DistanceField& field,
                              const PriorParams& params, const SolverConfig& cfg) {
    validate_params(params);
    validate_config(cfg);

    CandidateEval cur = joint_nll(init_guess, ctx, obs, field, params);
    if (!std::isfinite(cur.nll) || !std::isfinite(cur.grad.x) || !std::isfinite(cur.grad.y))
        throw std::runtime_error("solve_epoch: objective undefined at initial guess");

    EpochSolve out;
    out.nll_initial = cur.nll;
    Point2 p = init_guess;

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        if (norm(cur.grad) <= cfg.grad_tol) {
            out.converged = true;
            break;
        }
        double lr = cfg.learning_rate;
        bool accepted = false;
        Point2 cand;
        CandidateEval cand_eval;
        for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
            cand = p - lr * cur.grad;
            cand_eval = joint_nll(cand, ctx, obs, field, params);
            if (std::isfinite(cand_eval.nll) && cand_eval.nll < cur.nll) {
                accepted = true;
                break;
            }
            lr *= cfg.backtrack_factor;
        }
        if (!accepted) {
            out.backtrack_exhausted = true;
            break;
        }
        const double step_len = norm(cand - p);
        p = cand;
        cur = cand_eval;
        ++out.iterations;
        if (step_len <= cfg.step_tol) {
            out.converged = true;
            break;
        }
    }

    out.p_star = p;
    out.nll_final = cur.nll;
    return out;
}

struct CorrectionResult {
    Trajectory corrected;
    std::vector<EpochSolve> epochs;
};

// Recursively corrects a SLAM-estimated trajectory against the map prior.
// The SLAM polar series is taken relative to the SLAM trajectory's own
// first-step direction, so its first alpha is zero and the world-frame
// initial conditions supply position and heading.  Each epoch is
// initialized at the dead-reckoned prediction and solved to the local mode;
// the corrected step direction becomes the next epoch's heading.
inline CorrectionResult correct_trajectory(const Trajectory& slam_traj,
                                           const InitialConditions& init,
                                           const DistanceField& field,
                                           const PriorParams& params,
                                           const SolverConfig& cfg) {
    if (slam_traj.points.size() < 3)
        throw std::invalid_argument("correct_trajectory: need at least 3 points");
    validate_params(params);
    validate_config(cfg);

    const InitialConditions slam_init = initial_conditions_from(slam_traj);
    const std::vector<PolarStep> steps = angular_series(slam_traj, slam_init.heading0);

    CorrectionResult result;
    result.corrected.points.reserve(slam_traj.points.size());
    result.corrected.points.push_back(init.p0);
    result.corrected.timestamps = slam_traj.timestamps;
    result.epochs.reserve(steps.size());

    double heading = wrap_angle(init.heading0);
    double slam_heading = heading;  // dead-reckoned heading, for the ablation anchor
    Point2 p_prev = init.p0;

    for (std::size_t t = 0; t < steps.size(); ++t) {
        const EpochObservation obs{steps[t].alpha, steps[t].m};
        const double anchor = cfg.anchor_alpha_to_slam ? slam_heading : heading;
        const EpochContext ctx{p_prev, anchor};
        const double pred_heading = wrap_angle(anchor + obs.alpha_obs);
        const Point2 prediction{p_prev.x + obs.m_obs * std::cos(pred_heading),
                                p_prev.y + obs.m_obs * std::sin(pred_heading)};
        EpochSolve solve;
        try {
            solve = solve_epoch(prediction, ctx, obs, field, params, cfg);
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("epoch " + std::to_string(t + 1) + ": " + e.what());
        }

        const Point2 step = solve.p_star - p_prev;
        if (norm(step) >= kMinStepLength)
            heading = std::atan2(step.y, step.x);
        slam_heading = wrap_angle(slam_heading + obs.alpha_obs);
        p_prev = solve.p_star;
        result.corrected.points.push_back(solve.p_star);
        result.epochs.push_back(solve);
    }
    return result;
}

}  // namespace driftcorr
