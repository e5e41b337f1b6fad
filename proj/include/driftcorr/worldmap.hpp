#pragma once

// Traversable-path prior as a raster distance field.
//
// Vector polylines (road / walkway centerlines in world meters) are
// rasterized onto a regular grid, then an exact Euclidean distance
// transform assigns every cell its distance to the nearest path cell,
// truncated at d_max.  The field is sampled continuously with bilinear
// interpolation; its in-quad analytic gradient drives the optimizer.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "driftcorr/geometry.hpp"

namespace driftcorr {

struct PolylineMap {
    std::vector<std::vector<Point2>> polylines;  // world meters, >= 2 vertices each
};

inline void validate_map(const PolylineMap& map) {
    for (const auto& line : map.polylines) {
        if (line.size() < 2)
            throw std::invalid_argument("map: polyline with fewer than 2 vertices");
        for (const Point2& p : line)
            if (!std::isfinite(p.x) || !std::isfinite(p.y))
                throw std::invalid_argument("map: non-finite vertex");
    }
}

// Regular grid georeferencing.  origin is the world coordinate of the
// CENTER of cell (0,0); cell (i,j) has center origin + (i,j)*cell_size,
// with j counting rows upward (+y).
struct RasterSpec {
    Point2 origin;
    double cell_size = 1.0;  // meters per cell, > 0
    int width = 2;           // cells, >= 2
    int height = 2;

    [[nodiscard]] Point2 cell_center(int i, int j) const {
        return {origin.x + i * cell_size, origin.y + j * cell_size};
    }
};

inline void validate_spec(const RasterSpec& spec) {
    if (!(spec.cell_size > 0.0) || !std::isfinite(spec.cell_size))
        throw std::invalid_argument("raster spec: cell_size must be positive");
    if (spec.width < 2 || spec.height < 2)
        throw std::invalid_argument("raster spec: grid must be at least 2x2");
    if (!std::isfinite(spec.origin.x) || !std::isfinite(spec.origin.y))
        throw std::invalid_argument("raster spec: non-finite origin");
}

struct OccupancyGrid {
    RasterSpec spec;
    std::vector<std::uint8_t> cells;  // row-major, rows from origin upward

    [[nodiscard]] bool occupied(int i, int j) const {
        return cells[static_cast<std::size_t>(j) * spec.width + i] != 0;
    }
};

struct DistanceField {
    RasterSpec spec;
    std::vector<double> values;  // meters, row-major, each in [0, d_max]
    double d_max = 15.0;         // truncation radius, meters

    [[nodiscard]] double at(int i, int j) const {
        return values[static_cast<std::size_t>(j) * spec.width + i];
    }
};

inline double point_segment_distance(Point2 p, Point2 a, Point2 b) {
    const Point2 ab = b - a;
    const double len2 = ab.x * ab.x + ab.y * ab.y;
    if (len2 == 0.0)
        return norm(p - a);
    double t = ((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return norm(p - Point2{a.x + t * ab.x, a.y + t * ab.y});
}

// Grid extent covering the map's bounding box inflated by `padding` meters
// on every side.  Origin is not snapped to any global lattice, so shifting
// the map shifts the grid with it.
inline RasterSpec spec_for_map(const PolylineMap& map, double cell_size, double padding) {
    validate_map(map);
    if (!(cell_size > 0.0))
        throw std::invalid_argument("spec_for_map: cell_size must be positive");
    if (padding < 0.0)
        throw std::invalid_argument("spec_for_map: negative padding");
    double minx = std::numeric_limits<double>::infinity(), miny = minx;
    double maxx = -minx, maxy = -minx;
    for (const auto& line : map.polylines)
        for (const Point2& p : line) {
            minx = std::min(minx, p.x);
            miny = std::min(miny, p.y);
            maxx = std::max(maxx, p.x);
            maxy = std::max(maxy, p.y);
        }
    if (!std::isfinite(minx))
        throw std::invalid_argument("spec_for_map: empty map");
    RasterSpec spec;
    spec.origin = {minx - padding, miny - padding};
    spec.cell_size = cell_size;
    spec.width = std::max(2, static_cast<int>(std::ceil((maxx - minx + 2.0 * padding) / cell_size)) + 1);
    spec.height = std::max(2, static_cast<int>(std::ceil((maxy - miny + 2.0 * padding) / cell_size)) + 1);
    return spec;
}

// Marks a cell occupied iff the distance from its center to the nearest
// polyline segment is <= cell_size/2.  Exact point-to-segment tests, no
// scanline approximation, so connected polylines come out 8-connected.
inline OccupancyGrid rasterize(const PolylineMap& map, const RasterSpec& spec) {
    validate_map(map);
    validate_spec(spec);
    OccupancyGrid grid{spec, std::vector<std::uint8_t>(
                                 static_cast<std::size_t>(spec.width) * spec.height, 0)};
    const double half = spec.cell_size / 2.0;
    const double cs = spec.cell_size;
    for (const auto& line : map.polylines) {
        for (std::size_t k = 0; k + 1 < line.size(); ++k) {
            const Point2 a = line[k];
            const Point2 b = line[k + 1];
            // candidate cells: segment bbox inflated by half a cell
            const double lox = std::min(a.x, b.x) - half, hix = std::max(a.x, b.x) + half;
            const double loy = std::min(a.y, b.y) - half, hiy = std::max(a.y, b.y) + half;
            int i0 = std::max(0, static_cast<int>(std::floor((lox - spec.origin.x) / cs)));
            int i1 = std::min(spec.width - 1, static_cast<int>(std::ceil((hix - spec.origin.x) / cs)));
            int j0 = std::max(0, static_cast<int>(std::floor((loy - spec.origin.y) / cs)));
            int j1 = std::min(spec.height - 1, static_cast<int>(std::ceil((hiy - spec.origin.y) / cs)));
            for (int j = j0; j <= j1; ++j)
                for (int i = i0; i <= i1; ++i)
                    if (point_segment_distance(spec.cell_center(i, j), a, b) <= half)
                        grid.cells[static_cast<std::size_t>(j) * spec.width + i] = 1;
        }
    }
    if (std::find(grid.cells.begin(), grid.cells.end(), std::uint8_t{1}) == grid.cells.end())
        throw std::invalid_argument("rasterize: empty rasterization");
    return grid;
}

namespace detail {

// Background sentinel for the squared-distance passes.  Large but finite so
// the parabola intersections below stay well-defined; any real parabola
// undercuts it across the whole grid, so reachable cells stay exact.
inline constexpr double kFarAway = 1e20;

// 1-D squared distance transform (Felzenszwalb & Huttenlocher lower
// envelope of parabolas).  f holds squared distances (or kFarAway); d gets
// the transformed row.  Exact for integer-valued inputs.
inline void dt_1d(const std::vector<double>& f, std::vector<double>& d, int n) {
    static constexpr double kInf = std::numeric_limits<double>::infinity();
    std::vector<int> v(static_cast<std::size_t>(n));
    std::vector<double> z(static_cast<std::size_t>(n) + 1);
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = 1; q < n; ++q) {
        double s = ((f[q] + q * double(q)) - (f[v[k]] + v[k] * double(v[k]))) /
                   (2.0 * q - 2.0 * v[k]);
        while (s <= z[k]) {
            --k;
            s = ((f[q] + q * double(q)) - (f[v[k]] + v[k] * double(v[k]))) /
                (2.0 * q - 2.0 * v[k]);
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const double dq = q - double(v[k]);
        d[q] = dq * dq + f[v[k]];
    }
}

}  // namespace detail

// Exact Euclidean distance (cell centers, world meters) to the nearest
// occupied cell, clamped at d_max.
inline DistanceField distance_transform(const OccupancyGrid& occupancy, double d_max) {
    validate_spec(occupancy.spec);
    if (!(d_max > 0.0))
        throw std::invalid_argument("distance_transform: d_max must be positive");
    const int w = occupancy.spec.width;
    const int h = occupancy.spec.height;
    if (std::find(occupancy.cells.begin(), occupancy.cells.end(), std::uint8_t{1}) ==
        occupancy.cells.end())
        throw std::invalid_argument("distance_transform: no occupied cell");

    std::vector<double> sq(static_cast<std::size_t>(w) * h);
    for (std::size_t idx = 0; idx < sq.size(); ++idx)
        sq[idx] = occupancy.cells[idx] ? 0.0 : detail::kFarAway;

    // pass 1: columns
    {
        std::vector<double> f(static_cast<std::size_t>(h)), d(static_cast<std::size_t>(h));
        for (int i = 0; i < w; ++i) {
            for (int j = 0; j < h; ++j) f[j] = sq[static_cast<std::size_t>(j) * w + i];
            detail::dt_1d(f, d, h);
            for (int j = 0; j < h; ++j) sq[static_cast<std::size_t>(j) * w + i] = d[j];
        }
    }
    // pass 2: rows
    {
        std::vector<double> f(static_cast<std::size_t>(w)), d(static_cast<std::size_t>(w));
        for (int j = 0; j < h; ++j) {
            for (int i = 0; i < w; ++i) f[i] = sq[static_cast<std::size_t>(j) * w + i];
            detail::dt_1d(f, d, w);
            for (int i = 0; i < w; ++i) sq[static_cast<std::size_t>(j) * w + i] = d[i];
        }
    }

    DistanceField field{occupancy.spec, std::move(sq), d_max};
    for (double& v : field.values)
        v = std::min(std::sqrt(v) * occupancy.spec.cell_size, d_max);
    return field;
}

namespace detail {

struct QuadSample {
    int i0, j0;
    double fx, fy;   // fractional position inside the quad, in [0, 1]
    bool clamped;    // query was outside the cell-center extent
};

inline QuadSample locate_quad(const RasterSpec& spec, Point2 p) {
    double gx = (p.x - spec.origin.x) / spec.cell_size;
    double gy = (p.y - spec.origin.y) / spec.cell_size;
    QuadSample q{};
    q.clamped = gx < 0.0 || gx > spec.width - 1.0 || gy < 0.0 || gy > spec.height - 1.0;
    gx = std::clamp(gx, 0.0, spec.width - 1.0);
    gy = std::clamp(gy, 0.0, spec.height - 1.0);
    q.i0 = std::min(static_cast<int>(gx), spec.width - 2);
    q.j0 = std::min(static_cast<int>(gy), spec.height - 2);
    q.fx = gx - q.i0;
    q.fy = gy - q.j0;
    return q;
}

}  // namespace detail

// Bilinear interpolation of the four surrounding cell values.  Queries
// outside the cell-center extent are clamped to the border first.
inline double sample_bilinear(const DistanceField& field, Point2 p) {
    const auto q = detail::locate_quad(field.spec, p);
    const double v00 = field.at(q.i0, q.j0);
    const double v10 = field.at(q.i0 + 1, q.j0);
    const double v01 = field.at(q.i0, q.j0 + 1);
    const double v11 = field.at(q.i0 + 1, q.j0 + 1);
    return v00 * (1.0 - q.fx) * (1.0 - q.fy) + v10 * q.fx * (1.0 - q.fy) +
           v01 * (1.0 - q.fx) * q.fy + v11 * q.fx * q.fy;
}

// Analytic gradient of the bilinear surface, per meter.  Zero outside the
// extent (the clamped sample is flat there) and on saturated plateaus.
// Discontinuous across cell edges, which first-order descent tolerates.
inline Point2 gradient_bilinear(const DistanceField& field, Point2 p) {
    const auto q = detail::locate_quad(field.spec, p);
    if (q.clamped)
        return {0.0, 0.0};
    const double v00 = field.at(q.i0, q.j0);
    const double v10 = field.at(q.i0 + 1, q.j0);
    const double v01 = field.at(q.i0, q.j0 + 1);
    const double v11 = field.at(q.i0 + 1, q.j0 + 1);
    const double ddx = (v10 - v00) * (1.0 - q.fy) + (v11 - v01) * q.fy;
    const double ddy = (v01 - v00) * (1.0 - q.fx) + (v11 - v10) * q.fx;
    return {ddx / field.spec.cell_size, ddy / field.spec.cell_size};
}

}  // namespace driftcorr
