#pragma once

// Shared fixtures and independent oracles for the test suites.  Everything
// here recomputes expected values from first principles; none of it calls
// back into the implementation path it checks.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "driftcorr/geometry.hpp"
#include "driftcorr/rng.hpp"
#include "driftcorr/worldmap.hpp"

namespace testsupport {

using driftcorr::Point2;
using driftcorr::Trajectory;

// Random wandering trajectory: bounded step lengths and turn rates so the
// polar series stays well away from wrap boundaries.
inline Trajectory random_trajectory(driftcorr::SplitMix64& rng, std::size_t n_points,
                                    double step_min = 0.2, double step_max = 3.0,
                                    double max_turn = 1.2) {
    Trajectory traj;
    Point2 p{rng.uniform01() * 20.0 - 10.0, rng.uniform01() * 20.0 - 10.0};
    double heading = (rng.uniform01() * 2.0 - 1.0) * driftcorr::kPi * 0.95;
    traj.points.push_back(p);
    for (std::size_t i = 1; i < n_points; ++i) {
        heading = driftcorr::wrap_angle(heading + (rng.uniform01() * 2.0 - 1.0) * max_turn);
        const double m = step_min + rng.uniform01() * (step_max - step_min);
        p = {p.x + m * std::cos(heading), p.y + m * std::sin(heading)};
        traj.points.push_back(p);
    }
    return traj;
}

// O(cells * occupied) nearest-occupied-cell scan; the reference for the
// exact distance transform.
inline std::vector<double> brute_force_distance(const driftcorr::OccupancyGrid& grid,
                                                double d_max) {
    const int w = grid.spec.width;
    const int h = grid.spec.height;
    std::vector<std::pair<int, int>> occupied;
    for (int j = 0; j < h; ++j)
        for (int i = 0; i < w; ++i)
            if (grid.occupied(i, j)) occupied.emplace_back(i, j);

    std::vector<double> out(static_cast<std::size_t>(w) * h, 0.0);
    for (int j = 0; j < h; ++j) {
        for (int i = 0; i < w; ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& [oi, oj] : occupied) {
                const double dx = static_cast<double>(i - oi);
                const double dy = static_cast<double>(j - oj);
                best = std::min(best, dx * dx + dy * dy);
            }
            out[static_cast<std::size_t>(j) * w + i] =
                std::min(std::sqrt(best) * grid.spec.cell_size, d_max);
        }
    }
    return out;
}

// From-scratch bilinear formula over the stored grid, written directly from
// the textbook definition.
inline double bilinear_oracle(const driftcorr::DistanceField& field, Point2 p) {
    const auto& spec = field.spec;
    double gx = (p.x - spec.origin.x) / spec.cell_size;
    double gy = (p.y - spec.origin.y) / spec.cell_size;
    gx = std::min(std::max(gx, 0.0), static_cast<double>(spec.width - 1));
    gy = std::min(std::max(gy, 0.0), static_cast<double>(spec.height - 1));
    int i = static_cast<int>(std::floor(gx));
    int j = static_cast<int>(std::floor(gy));
    if (i > spec.width - 2) i = spec.width - 2;
    if (j > spec.height - 2) j = spec.height - 2;
    const double u = gx - i;
    const double v = gy - j;
    auto val = [&](int a, int b) {
        return field.values[static_cast<std::size_t>(b) * spec.width + a];
    };
    const double bottom = val(i, j) * (1.0 - u) + val(i + 1, j) * u;
    const double top = val(i, j + 1) * (1.0 - u) + val(i + 1, j + 1) * u;
    return bottom * (1.0 - v) + top * v;
}

// Central finite difference of a scalar function of a 2-D point.
template <typename F>
inline Point2 central_difference(F&& f, Point2 p, double h) {
    const double gx = (f(Point2{p.x + h, p.y}) - f(Point2{p.x - h, p.y})) / (2.0 * h);
    const double gy = (f(Point2{p.x, p.y + h}) - f(Point2{p.x, p.y - h})) / (2.0 * h);
    return {gx, gy};
}

// Minimal XML well-formedness scan: tag balance, attribute quoting, a
// single root element.  Enough to catch malformed SVG output.
inline bool xml_well_formed(const std::string& text) {
    std::vector<std::string> stack;
    std::size_t i = 0;
    const std::size_t n = text.size();
    bool seen_root = false;
    while (i < n) {
        if (text[i] != '<') {
            ++i;
            continue;
        }
        if (text.compare(i, 2, "<?") == 0) {
            const auto end = text.find("?>", i);
            if (end == std::string::npos) return false;
            i = end + 2;
            continue;
        }
        if (text.compare(i, 4, "<!--") == 0) {
            const auto end = text.find("-->", i);
            if (end == std::string::npos) return false;
            i = end + 3;
            continue;
        }
        const auto close = text.find('>', i);
        if (close == std::string::npos) return false;
        std::string tag = text.substr(i + 1, close - i - 1);
        // reject unescaped '<' inside the tag
        if (tag.find('<') != std::string::npos) return false;
        bool closing = false, self_closing = false;
        if (!tag.empty() && tag.front() == '/') {
            closing = true;
            tag.erase(0, 1);
        }
        if (!tag.empty() && tag.back() == '/') {
            self_closing = true;
            tag.pop_back();
        }
        const auto sp = tag.find_first_of(" \t\r\n");
        const std::string name = sp == std::string::npos ? tag : tag.substr(0, sp);
        if (name.empty()) return false;
        // attribute quotes must be balanced
        if (std::count(tag.begin(), tag.end(), '"') % 2 != 0) return false;
        if (closing) {
            if (stack.empty() || stack.back() != name) return false;
            stack.pop_back();
        } else if (!self_closing) {
            if (stack.empty() && seen_root) return false;  // second root
            stack.push_back(name);
            seen_root = true;
        } else if (stack.empty()) {
            if (seen_root) return false;
            seen_root = true;
        }
        i = close + 1;
    }
    return stack.empty() && seen_root;
}

}  // namespace testsupport
