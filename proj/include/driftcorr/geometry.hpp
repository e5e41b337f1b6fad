#pragma once

// Planar trajectory representation and its differential / polar form.
//
// A trajectory is an ordered list of east/north positions in meters.
// Differencing consecutive points gives motion steps; each step has an
// absolute direction phi and a magnitude m, and the per-epoch angular
// motion alpha is the wrapped change of direction between steps.  Given
// initial conditions (position + heading) the polar series integrates
// back to the original trajectory, which is what makes the representation
// frame-independent.

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace driftcorr {

inline constexpr double kPi = std::numbers::pi;

struct Point2 {
    double x = 0.0;  // east, meters
    double y = 0.0;  // north, meters

    friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }
    friend bool operator==(const Point2&, const Point2&) = default;
};

inline double norm(Point2 p) { return std::hypot(p.x, p.y); }

struct MotionStep {
    double dx = 0.0;
    double dy = 0.0;
};

// One differential epoch in polar form.  phi is the absolute motion
// direction in (-pi, pi], alpha the wrapped direction change from the
// previous epoch, m the step length in meters.
struct PolarStep {
    double phi = 0.0;
    double alpha = 0.0;
    double m = 0.0;
};

struct Polar {
    double phi = 0.0;
    double m = 0.0;
};

struct InitialConditions {
    Point2 p0;
    double heading0 = 0.0;  // initial motion direction, radians in (-pi, pi]
};

struct Trajectory {
    std::vector<Point2> points;
    std::vector<double> timestamps;  // optional; empty or same length as points

    [[nodiscard]] std::size_t size() const { return points.size(); }
    [[nodiscard]] bool empty() const { return points.empty(); }
    [[nodiscard]] bool has_timestamps() const { return !timestamps.empty(); }
};

// Throws std::invalid_argument if the trajectory breaks its invariants:
// at least one point, finite coordinates, and timestamps (when present)
// matching the point count and strictly increasing.
inline void validate_trajectory(const Trajectory& traj) {
    if (traj.points.empty())
        throw std::invalid_argument("trajectory: empty trajectory");
    for (const Point2& p : traj.points)
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw std::invalid_argument("trajectory: non-finite coordinate");
    if (!traj.timestamps.empty()) {
        if (traj.timestamps.size() != traj.points.size())
            throw std::invalid_argument("trajectory: timestamp count mismatch");
        for (std::size_t i = 1; i < traj.timestamps.size(); ++i)
            if (!(traj.timestamps[i] > traj.timestamps[i - 1]))
                throw std::invalid_argument("trajectory: timestamps not strictly increasing");
    }
}

// Wraps an angle into (-pi, pi].  -pi and pi are the same direction; pi is
// the canonical representative.
inline double wrap_angle(double theta) {
    if (!std::isfinite(theta))
        throw std::invalid_argument("wrap_angle: non-finite angle");
    double r = std::remainder(theta, 2.0 * kPi);  // lands in [-pi, pi]
    if (r <= -kPi)
        r = kPi;
    return r;
}

// First-order difference of consecutive points.
inline std::vector<MotionStep> differentiate(const Trajectory& traj) {
    if (traj.points.size() < 2)
        throw std::invalid_argument("differentiate: insufficient points");
    std::vector<MotionStep> steps;
    steps.reserve(traj.points.size() - 1);
    for (std::size_t i = 1; i < traj.points.size(); ++i)
        steps.push_back({traj.points[i].x - traj.points[i - 1].x,
                         traj.points[i].y - traj.points[i - 1].y});
    return steps;
}

// Polar form of a single motion step.  A zero-length step has no direction;
// by convention phi = 0 in that case.
inline Polar to_polar(const MotionStep& step) {
    const double m = std::hypot(step.dx, step.dy);
    if (m == 0.0)
        return {0.0, 0.0};
    return {std::atan2(step.dy, step.dx), m};
}

// Polar series of a trajectory: one PolarStep per motion step.  The first
// alpha is measured against reference_heading (the platform's known initial
// motion direction); subsequent alphas against the previous step's phi.
// Zero-length steps keep the previous heading and contribute alpha = 0, so
// a stationary epoch never injects a spurious rotation.
inline std::vector<PolarStep> angular_series(const Trajectory& traj,
                                             double reference_heading = 0.0) {
    if (traj.points.size() < 3)
        throw std::invalid_argument("angular_series: need at least 3 points");
    const std::vector<MotionStep> steps = differentiate(traj);
    std::vector<PolarStep> out;
    out.reserve(steps.size());
    double prev_phi = wrap_angle(reference_heading);
    for (const MotionStep& s : steps) {
        const Polar p = to_polar(s);
        PolarStep ps;
        ps.m = p.m;
        if (p.m == 0.0) {
            ps.phi = prev_phi;
            ps.alpha = 0.0;
        } else {
            ps.phi = p.phi;
            ps.alpha = wrap_angle(p.phi - prev_phi);
            prev_phi = p.phi;
        }
        out.push_back(ps);
    }
    return out;
}

// Rebuilds absolute positions from initial conditions and a polar series.
// heading_t = wrap(heading_{t-1} + alpha_t), p_t = p_{t-1} + m_t * dir(heading_t).
// Output has steps.size() + 1 points and no timestamps.
inline Trajectory integrate(const InitialConditions& init,
                            std::span<const PolarStep> steps) {
    Trajectory traj;
    traj.points.reserve(steps.size() + 1);
    traj.points.push_back(init.p0);
    double heading = wrap_angle(init.heading0);
    Point2 p = init.p0;
    for (const PolarStep& s : steps) {
        heading = wrap_angle(heading + s.alpha);
        p = {p.x + s.m * std::cos(heading), p.y + s.m * std::sin(heading)};
        traj.points.push_back(p);
    }
    return traj;
}

// Initial conditions consistent with angular_series(traj, heading0): the
// first point plus the direction of the first step (0 for a zero step).
inline InitialConditions initial_conditions_from(const Trajectory& traj) {
    if (traj.points.size() < 2)
        throw std::invalid_argument("initial_conditions_from: insufficient points");
    const MotionStep first{traj.points[1].x - traj.points[0].x,
                           traj.points[1].y - traj.points[0].y};
    return {traj.points[0], to_polar(first).phi};
}

// Euclidean distance between the final points of two trajectories.
inline double closing_distance(const Trajectory& estimate, const Trajectory& reference) {
    if (estimate.points.empty() || reference.points.empty())
        throw std::invalid_argument("closing_distance: empty trajectory");
    return norm(estimate.points.back() - reference.points.back());
}

}  // namespace driftcorr
