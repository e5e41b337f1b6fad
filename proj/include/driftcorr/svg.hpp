#pragma once

// Standalone SVG rendering of trajectories over an optional distance-field
// heat layer.  Series colors follow the reporting convention: reference
// blue, corrected red, SLAM green; start markers orange, end markers black.

#include <algorithm>
#include <array>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "driftcorr/geometry.hpp"
#include "driftcorr/worldmap.hpp"

namespace driftcorr::svg {

struct PlotSeries {
    std::string label;
    Trajectory traj;
};

inline constexpr std::array<const char*, 6> kSeriesColors = {
    "blue", "red", "green", "purple", "teal", "brown"};

namespace detail {

inline std::string num(double v) {
    std::array<char, 32> buf{};
    const int n = std::snprintf(buf.data(), buf.size(), "%.2f", v);
    return std::string(buf.data(), static_cast<std::size_t>(n));
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c; break;
        }
    }
    return out;
}

struct WorldToPixel {
    double min_x, max_y, scale, margin;

    [[nodiscard]] double px(double x) const { return margin + (x - min_x) * scale; }
    [[nodiscard]] double py(double y) const { return margin + (max_y - y) * scale; }
};

}  // namespace detail

// Renders the overlay as a complete SVG document.  Throws on empty input.
inline std::string render_plot(const std::vector<PlotSeries>& series,
                               const DistanceField* field = nullptr,
                               double canvas_width = 800.0) {
    if (series.empty())
        throw std::invalid_argument("plot: no trajectories");
    for (const PlotSeries& s : series)
        if (s.traj.points.empty())
            throw std::invalid_argument("plot: empty trajectory '" + s.label + "'");

    double min_x = std::numeric_limits<double>::infinity(), min_y = min_x;
    double max_x = -min_x, max_y = -min_x;
    auto grow = [&](Point2 p) {
        min_x = std::min(min_x, p.x);
        min_y = std::min(min_y, p.y);
        max_x = std::max(max_x, p.x);
        max_y = std::max(max_y, p.y);
    };
    for (const PlotSeries& s : series)
        for (const Point2& p : s.traj.points) grow(p);
    if (field) {
        const double cs = field->spec.cell_size;
        grow(field->spec.origin - Point2{cs / 2, cs / 2});
        grow(field->spec.cell_center(field->spec.width - 1, field->spec.height - 1) +
             Point2{cs / 2, cs / 2});
    }

    const double span_x = std::max(max_x - min_x, 1e-9);
    const double span_y = std::max(max_y - min_y, 1e-9);
    const double margin = 20.0;
    const double scale = (canvas_width - 2.0 * margin) / span_x;
    const double canvas_height = span_y * scale + 2.0 * margin;
    const detail::WorldToPixel w2p{min_x, max_y, scale, margin};

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::num(canvas_width) +
           "\" height=\"" + detail::num(canvas_height) + "\" viewBox=\"0 0 " +
           detail::num(canvas_width) + " " + detail::num(canvas_height) + "\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"" + detail::num(canvas_width) + "\" height=\"" +
           detail::num(canvas_height) + "\" fill=\"white\"/>\n";

    if (field) {
        // one rect per cell, darker toward the path centerline
        const double cs = field->spec.cell_size;
        const double side = cs * scale;
        for (int j = 0; j < field->spec.height; ++j) {
            for (int i = 0; i < field->spec.width; ++i) {
                const double t = field->at(i, j) / field->d_max;  // 0 on path, 1 on plateau
                const int shade = 120 + static_cast<int>(135.0 * t);
                if (shade >= 255) continue;  // plateau stays background white
                const Point2 c = field->spec.cell_center(i, j);
                out += "<rect x=\"" + detail::num(w2p.px(c.x - cs / 2)) + "\" y=\"" +
                       detail::num(w2p.py(c.y + cs / 2)) + "\" width=\"" + detail::num(side) +
                       "\" height=\"" + detail::num(side) + "\" fill=\"rgb(" +
                       std::to_string(shade) + "," + std::to_string(shade) + "," +
                       std::to_string(shade) + ")\"/>\n";
            }
        }
    }

    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = kSeriesColors[k % kSeriesColors.size()];
        const Trajectory& traj = series[k].traj;
        if (traj.points.size() > 1) {
            out += "<polyline fill=\"none\" stroke=\"";
            out += color;
            out += "\" stroke-width=\"1.5\" points=\"";
            for (const Point2& p : traj.points) {
                out += detail::num(w2p.px(p.x)) + "," + detail::num(w2p.py(p.y)) + " ";
            }
            out += "\"/>\n";
        }
        const Point2 start = traj.points.front();
        const Point2 end = traj.points.back();
        out += "<circle cx=\"" + detail::num(w2p.px(start.x)) + "\" cy=\"" +
               detail::num(w2p.py(start.y)) + "\" r=\"4\" fill=\"orange\"/>\n";
        out += "<circle cx=\"" + detail::num(w2p.px(end.x)) + "\" cy=\"" +
               detail::num(w2p.py(end.y)) + "\" r=\"4\" fill=\"black\"/>\n";
    }

    // legend
    double ly = margin;
    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* color = kSeriesColors[k % kSeriesColors.size()];
        out += "<text x=\"" + detail::num(margin) + "\" y=\"" + detail::num(ly) +
               "\" font-size=\"12\" fill=\"";
        out += color;
        out += "\">" + detail::xml_escape(series[k].label) + "</text>\n";
        ly += 14.0;
    }

    out += "</svg>\n";
    return out;
}

}  // namespace driftcorr::svg
