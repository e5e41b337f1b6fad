#pragma once

// Synthetic scenarios at desk scale: ground-truth trajectories on simple
// road shapes, a dead-reckoning drift model that turns truth into
// SLAM-like input, and the closing-distance evaluation.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "driftcorr/geometry.hpp"
#include "driftcorr/rng.hpp"
#include "driftcorr/worldmap.hpp"

namespace driftcorr {

// Per-epoch perturbation of the polar series: a constant heading-rate bias,
// a multiplicative magnitude bias, and white noise on both channels.
struct DriftModel {
    double heading_rate_bias = 0.0;    // rad per epoch
    double scale_bias = 1.0;           // multiplier on m, > 0
    double angle_noise_std = 0.0;      // rad
    double magnitude_noise_std = 0.0;  // m
    std::uint64_t seed = 0;
};

inline void validate_drift(const DriftModel& d) {
    if (!(d.scale_bias > 0.0))
        throw std::invalid_argument("drift model: scale_bias must be positive");
    if (d.angle_noise_std < 0.0 || d.magnitude_noise_std < 0.0)
        throw std::invalid_argument("drift model: noise stds must be non-negative");
}

enum class PathKind { straight, l_turns, loop };

inline const char* to_string(PathKind kind) {
    switch (kind) {
        case PathKind::straight: return "straight";
        case PathKind::l_turns: return "l_turns";
        case PathKind::loop: return "loop";
    }
    return "unknown";
}

inline PathKind path_kind_from_string(const std::string& s) {
    if (s == "straight") return PathKind::straight;
    if (s == "l_turns") return PathKind::l_turns;
    if (s == "loop") return PathKind::loop;
    throw std::invalid_argument("unknown path kind: " + s);
}

struct Scenario {
    std::string name;
    PolylineMap map;
    Trajectory truth;
    DriftModel drift;
};

struct EvalReport {
    double closing_corrected = 0.0;
    double closing_slam = 0.0;
    double rmse_corrected = 0.0;
    double rmse_slam = 0.0;
    double max_err_corrected = 0.0;
    double improvement_factor = 0.0;  // closing_slam / max(closing_corrected, 1e-9)
};

namespace detail {

// Points every `step` meters of arc length along a polyline, including the
// start and, when the total length is a multiple of step, the exact end.
inline std::vector<Point2> sample_polyline(const std::vector<Point2>& verts, double step) {
    std::vector<double> cumulative(verts.size(), 0.0);
    for (std::size_t k = 1; k < verts.size(); ++k)
        cumulative[k] = cumulative[k - 1] + norm(verts[k] - verts[k - 1]);
    const double total = cumulative.back();

    std::vector<Point2> pts;
    std::size_t seg = 0;
    for (std::size_t k = 0;; ++k) {
        const double s = k * step;
        if (s > total + 1e-9) break;
        while (seg + 2 < verts.size() && s > cumulative[seg + 1]) ++seg;
        const double seg_len = cumulative[seg + 1] - cumulative[seg];
        const double t = seg_len > 0.0 ? std::clamp((s - cumulative[seg]) / seg_len, 0.0, 1.0) : 0.0;
        const Point2 a = verts[seg];
        const Point2 b = verts[seg + 1];
        pts.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
    return pts;
}

}  // namespace detail

// Vertex skeleton of the scenario road.  l_turns alternates +x / +y legs of
// `segment_length` meters with a final partial leg; corners therefore sit at
// every multiple of segment_length strictly inside the path.
inline std::vector<Point2> scenario_vertices(PathKind kind, double length,
                                             double segment_length = 100.0) {
    if (!(length > 0.0))
        throw std::invalid_argument("scenario: length must be positive");
    std::vector<Point2> verts;
    switch (kind) {
        case PathKind::straight:
            verts = {{0.0, 0.0}, {length, 0.0}};
            break;
        case PathKind::l_turns: {
            if (!(segment_length > 0.0))
                throw std::invalid_argument("scenario: segment_length must be positive");
            verts.push_back({0.0, 0.0});
            double remaining = length;
            bool along_x = true;
            Point2 p{0.0, 0.0};
            while (remaining > 1e-9) {
                const double leg = std::min(segment_length, remaining);
                if (along_x) p.x += leg; else p.y += leg;
                verts.push_back(p);
                remaining -= leg;
                along_x = !along_x;
            }
            break;
        }
        case PathKind::loop: {
            const double side = length / 4.0;
            verts = {{0.0, 0.0}, {side, 0.0}, {side, side}, {0.0, side}, {0.0, 0.0}};
            break;
        }
    }
    return verts;
}

// Truth path sampled every `step` meters on a road map whose centerline
// coincides with it.  lateral_offset shifts the truth off the centerline
// (map unchanged) to probe map-uncertainty sensitivity.
inline Scenario make_scenario(PathKind kind, double length, double step,
                              const DriftModel& drift, double segment_length = 100.0,
                              double lateral_offset = 0.0) {
    if (!(length > 0.0) || !(step > 0.0))
        throw std::invalid_argument("make_scenario: length and step must be positive");
    validate_drift(drift);

    Scenario sc;
    sc.name = to_string(kind);
    sc.drift = drift;
    const std::vector<Point2> verts = scenario_vertices(kind, length, segment_length);
    sc.map.polylines.push_back(verts);

    std::vector<Point2> pts = detail::sample_polyline(verts, step);
    if (lateral_offset != 0.0)
        for (Point2& p : pts) p.y += lateral_offset;
    sc.truth.points = std::move(pts);
    sc.truth.timestamps.resize(sc.truth.points.size());
    for (std::size_t i = 0; i < sc.truth.timestamps.size(); ++i)
        sc.truth.timestamps[i] = static_cast<double>(i);
    return sc;
}

// Applies the drift model to a ground-truth trajectory: perturbs its polar
// series epoch by epoch and re-integrates from the true initial conditions.
// Deterministic for a fixed seed.
inline Trajectory inject_drift(const Trajectory& truth, const DriftModel& drift) {
    validate_drift(drift);
    if (truth.points.size() < 3)
        throw std::invalid_argument("inject_drift: need at least 3 points");

    const InitialConditions init = initial_conditions_from(truth);
    std::vector<PolarStep> steps = angular_series(truth, init.heading0);
    SplitMix64 rng(drift.seed);
    for (PolarStep& s : steps) {
        const double angle_noise = rng.normal() * drift.angle_noise_std;
        const double mag_noise = rng.normal() * drift.magnitude_noise_std;
        s.alpha = wrap_angle(s.alpha + drift.heading_rate_bias + angle_noise);
        s.m = std::max(0.0, s.m * drift.scale_bias + mag_noise);
    }
    Trajectory drifted = integrate(init, steps);
    drifted.timestamps = truth.timestamps;
    return drifted;
}

// Closing distance, RMSE and max position error of both estimates against
// the reference.
inline EvalReport evaluate(const Trajectory& corrected, const Trajectory& slam_only,
                           const Trajectory& reference) {
    if (corrected.points.size() != reference.points.size() ||
        slam_only.points.size() != reference.points.size())
        throw std::invalid_argument("evaluate: trajectory length mismatch");
    if (reference.points.empty())
        throw std::invalid_argument("evaluate: empty trajectory");

    EvalReport rep;
    rep.closing_corrected = closing_distance(corrected, reference);
    rep.closing_slam = closing_distance(slam_only, reference);

    double sum_sq_c = 0.0, sum_sq_s = 0.0;
    for (std::size_t i = 0; i < reference.points.size(); ++i) {
        const double ec = norm(corrected.points[i] - reference.points[i]);
        const double es = norm(slam_only.points[i] - reference.points[i]);
        sum_sq_c += ec * ec;
        sum_sq_s += es * es;
        rep.max_err_corrected = std::max(rep.max_err_corrected, ec);
    }
    const double n = static_cast<double>(reference.points.size());
    rep.rmse_corrected = std::sqrt(sum_sq_c / n);
    rep.rmse_slam = std::sqrt(sum_sq_s / n);
    rep.improvement_factor = rep.closing_slam / std::max(rep.closing_corrected, 1e-9);
    return rep;
}

}  // namespace driftcorr
