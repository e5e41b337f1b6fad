#pragma once

// File formats:
//   trajectory  CSV, header "t,x,y", one row per epoch, '.' decimal point
//   map         JSON {"polylines": [[[x,y], ...], ...]} in world meters
//   field       DFLD binary: magic "DFLD", u32 version, f64 origin_x,
//               origin_y, cell_size, d_max, u32 width, height, then
//               width*height f64 values row-major, rows from origin upward;
//               all little-endian
//   config      JSON with optional "priors", "solver", "raster" sections
// All formats are versioned; unknown versions are refused.

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "driftcorr/corrector.hpp"
#include "driftcorr/geometry.hpp"
#include "driftcorr/priors.hpp"
#include "driftcorr/simulator.hpp"
#include "driftcorr/worldmap.hpp"

namespace driftcorr::io {

// Malformed or unreadable input data; the CLI maps this to exit code 2.
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kFieldFormatVersion = 1;
inline constexpr int kJsonFormatVersion = 1;

namespace detail {

inline std::string shortest(double v) {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

inline double parse_double(std::string_view s, const std::string& where) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last)
        throw data_error(where + ": malformed number '" + std::string(s) + "'");
    return v;
}

inline void check_json_version(const nlohmann::json& j, const std::string& path) {
    if (j.contains("version") && j["version"] != kJsonFormatVersion)
        throw data_error(path + ": unsupported format version " + j["version"].dump());
}

inline nlohmann::json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw data_error(path.string() + ": cannot open file");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw data_error(path.string() + ": invalid JSON: " + e.what());
    }
    check_json_version(j, path.string());
    return j;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw data_error(path.string() + ": cannot open file for writing");
    out << content;
    if (!out)
        throw data_error(path.string() + ": write failed");
}

}  // namespace detail

// ---- trajectory CSV ----

inline Trajectory load_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw data_error(path.string() + ": cannot open file");
    std::string line;
    if (!std::getline(in, line))
        throw data_error(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t,x,y")
        throw data_error(path.string() + ":1: expected header 't,x,y'");

    Trajectory traj;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(lineno);
        const auto c1 = line.find(',');
        const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos ||
            line.find(',', c2 + 1) != std::string::npos)
            throw data_error(where + ": expected 3 comma-separated fields");
        traj.timestamps.push_back(detail::parse_double(std::string_view(line).substr(0, c1), where));
        traj.points.push_back(
            {detail::parse_double(std::string_view(line).substr(c1 + 1, c2 - c1 - 1), where),
             detail::parse_double(std::string_view(line).substr(c2 + 1), where)});
    }
    try {
        validate_trajectory(traj);
    } catch (const std::invalid_argument& e) {
        throw data_error(path.string() + ": " + e.what());
    }
    return traj;
}

inline void save_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    std::string out = "t,x,y\n";
    for (std::size_t i = 0; i < traj.points.size(); ++i) {
        const double t = traj.has_timestamps() ? traj.timestamps[i] : static_cast<double>(i);
        out += detail::shortest(t);
        out += ',';
        out += detail::shortest(traj.points[i].x);
        out += ',';
        out += detail::shortest(traj.points[i].y);
        out += '\n';
    }
    detail::write_text_file(path, out);
}

// ---- map JSON ----

inline PolylineMap load_map_json(const std::filesystem::path& path) {
    const nlohmann::json j = detail::load_json_file(path);
    if (!j.contains("polylines") || !j["polylines"].is_array())
        throw data_error(path.string() + ": missing 'polylines' array");
    PolylineMap map;
    for (const auto& jline : j["polylines"]) {
        std::vector<Point2> line;
        for (const auto& jp : jline) {
            if (!jp.is_array() || jp.size() != 2)
                throw data_error(path.string() + ": vertex must be [x, y]");
            line.push_back({jp[0].get<double>(), jp[1].get<double>()});
        }
        map.polylines.push_back(std::move(line));
    }
    try {
        validate_map(map);
    } catch (const std::invalid_argument& e) {
        throw data_error(path.string() + ": " + e.what());
    }
    return map;
}

inline void save_map_json(const std::filesystem::path& path, const PolylineMap& map) {
    nlohmann::json jlines = nlohmann::json::array();
    for (const auto& line : map.polylines) {
        nlohmann::json jline = nlohmann::json::array();
        for (const Point2& p : line) jline.push_back({p.x, p.y});
        jlines.push_back(std::move(jline));
    }
    const nlohmann::json j{{"version", kJsonFormatVersion}, {"polylines", std::move(jlines)}};
    detail::write_text_file(path, j.dump(2) + "\n");
}

// ---- DFLD binary field ----

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_f64(std::string& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

struct ByteReader {
    const unsigned char* p;
    const unsigned char* end;
    const std::string& path;

    void need(std::size_t n) const {
        if (static_cast<std::size_t>(end - p) < n)
            throw data_error(path + ": truncated field file");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
        p += 4;
        return v;
    }
    double f64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
        p += 8;
        return std::bit_cast<double>(v);
    }
};

}  // namespace detail

inline void save_field(const std::filesystem::path& path, const DistanceField& field) {
    std::string out;
    out.reserve(48 + field.values.size() * 8);
    out += "DFLD";
    detail::put_u32(out, kFieldFormatVersion);
    detail::put_f64(out, field.spec.origin.x);
    detail::put_f64(out, field.spec.origin.y);
    detail::put_f64(out, field.spec.cell_size);
    detail::put_f64(out, field.d_max);
    detail::put_u32(out, static_cast<std::uint32_t>(field.spec.width));
    detail::put_u32(out, static_cast<std::uint32_t>(field.spec.height));
    for (double v : field.values) detail::put_f64(out, v);
    detail::write_text_file(path, out);
}

inline DistanceField load_field(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw data_error(path.string() + ": cannot open file");
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::string pstr = path.string();
    if (bytes.size() < 4 || bytes.compare(0, 4, "DFLD") != 0)
        throw data_error(pstr + ": not a DFLD field file");
    detail::ByteReader r{reinterpret_cast<const unsigned char*>(bytes.data()) + 4,
                         reinterpret_cast<const unsigned char*>(bytes.data()) + bytes.size(),
                         pstr};
    const std::uint32_t version = r.u32();
    if (version != kFieldFormatVersion)
        throw data_error(pstr + ": unsupported DFLD version " + std::to_string(version));
    DistanceField field;
    field.spec.origin.x = r.f64();
    field.spec.origin.y = r.f64();
    field.spec.cell_size = r.f64();
    field.d_max = r.f64();
    field.spec.width = static_cast<int>(r.u32());
    field.spec.height = static_cast<int>(r.u32());
    try {
        validate_spec(field.spec);
    } catch (const std::invalid_argument& e) {
        throw data_error(pstr + ": " + e.what());
    }
    const std::size_t count = static_cast<std::size_t>(field.spec.width) * field.spec.height;
    field.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) field.values[i] = r.f64();
    return field;
}

// ---- run configuration ----

struct RunConfig {
    PriorParams priors;
    SolverConfig solver;
    double cell_size = 1.0;
    double d_max = 15.0;
    double padding = -1.0;  // < 0 means "use d_max"

    [[nodiscard]] double effective_padding() const {
        return padding < 0.0 ? d_max : padding;
    }
};

inline RunConfig load_config(const std::filesystem::path& path) {
    const nlohmann::json j = detail::load_json_file(path);
    const std::string pstr = path.string();
    RunConfig cfg;
    try {
        if (j.contains("priors")) {
            const auto& jp = j["priors"];
            if (jp.contains("sigma")) {
                const auto& s = jp["sigma"];
                if (!s.is_array() || s.size() != 4)
                    throw data_error(pstr + ": priors.sigma must have 4 entries");
                cfg.priors.sigma1 = s[0].get<double>();
                cfg.priors.sigma2 = s[1].get<double>();
                cfg.priors.sigma3 = s[2].get<double>();
                cfg.priors.sigma4 = s[3].get<double>();
            }
            if (jp.contains("weight")) {
                const auto& w = jp["weight"];
                if (!w.is_array() || w.size() != 4)
                    throw data_error(pstr + ": priors.weight must have 4 entries");
                cfg.priors.w1 = w[0].get<double>();
                cfg.priors.w2 = w[1].get<double>();
                cfg.priors.w3 = w[2].get<double>();
                cfg.priors.w4 = w[3].get<double>();
            }
            if (jp.contains("sigma2_scale"))
                cfg.priors.sigma2_scale = jp["sigma2_scale"].get<double>();
        }
        if (j.contains("solver")) {
            const auto& js = j["solver"];
            if (js.contains("lr")) cfg.solver.learning_rate = js["lr"].get<double>();
            if (js.contains("max_iters")) cfg.solver.max_iters = js["max_iters"].get<int>();
            if (js.contains("grad_tol")) cfg.solver.grad_tol = js["grad_tol"].get<double>();
            if (js.contains("step_tol")) cfg.solver.step_tol = js["step_tol"].get<double>();
            if (js.contains("backtrack_factor"))
                cfg.solver.backtrack_factor = js["backtrack_factor"].get<double>();
            if (js.contains("max_backtracks"))
                cfg.solver.max_backtracks = js["max_backtracks"].get<int>();
            if (js.contains("anchor_alpha_to_slam"))
                cfg.solver.anchor_alpha_to_slam = js["anchor_alpha_to_slam"].get<bool>();
        }
        if (j.contains("raster")) {
            const auto& jr = j["raster"];
            if (jr.contains("cell_size")) cfg.cell_size = jr["cell_size"].get<double>();
            if (jr.contains("d_max")) cfg.d_max = jr["d_max"].get<double>();
            if (jr.contains("padding")) cfg.padding = jr["padding"].get<double>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw data_error(pstr + ": invalid config: " + e.what());
    }
    try {
        validate_params(cfg.priors);
        validate_config(cfg.solver);
    } catch (const std::invalid_argument& e) {
        throw data_error(pstr + ": " + e.what());
    }
    return cfg;
}

// ---- scenario directory ----

inline void save_scenario_json(const std::filesystem::path& path, const Scenario& sc,
                               double step) {
    const nlohmann::json j{
        {"version", kJsonFormatVersion},
        {"name", sc.name},
        {"step", step},
        {"drift",
         {{"heading_rate_bias", sc.drift.heading_rate_bias},
          {"scale_bias", sc.drift.scale_bias},
          {"angle_noise_std", sc.drift.angle_noise_std},
          {"magnitude_noise_std", sc.drift.magnitude_noise_std},
          {"seed", sc.drift.seed}}}};
    detail::write_text_file(path, j.dump(2) + "\n");
}

inline DriftModel load_drift_json(const std::filesystem::path& path) {
    const nlohmann::json j = detail::load_json_file(path);
    if (!j.contains("drift"))
        throw data_error(path.string() + ": missing 'drift' section");
    const auto& jd = j["drift"];
    DriftModel d;
    try {
        d.heading_rate_bias = jd.at("heading_rate_bias").get<double>();
        d.scale_bias = jd.at("scale_bias").get<double>();
        d.angle_noise_std = jd.at("angle_noise_std").get<double>();
        d.magnitude_noise_std = jd.at("magnitude_noise_std").get<double>();
        d.seed = jd.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw data_error(path.string() + ": invalid drift section: " + e.what());
    }
    return d;
}

// Writes map.json, truth.csv, slam.csv, scenario.json into dir.
inline void write_scenario_dir(const std::filesystem::path& dir, const Scenario& sc,
                               const Trajectory& slam, double step) {
    std::filesystem::create_directories(dir);
    save_map_json(dir / "map.json", sc.map);
    save_trajectory_csv(dir / "truth.csv", sc.truth);
    save_trajectory_csv(dir / "slam.csv", slam);
    save_scenario_json(dir / "scenario.json", sc, step);
}

// ---- solve log and evaluation report ----

inline void save_epochs_json(const std::filesystem::path& path,
                             const std::vector<EpochSolve>& epochs) {
    nlohmann::json jlist = nlohmann::json::array();
    for (std::size_t i = 0; i < epochs.size(); ++i) {
        const EpochSolve& e = epochs[i];
        jlist.push_back({{"epoch", i + 1},
                         {"p", {e.p_star.x, e.p_star.y}},
                         {"nll_initial", e.nll_initial},
                         {"nll_final", e.nll_final},
                         {"iterations", e.iterations},
                         {"converged", e.converged},
                         {"backtrack_exhausted", e.backtrack_exhausted}});
    }
    const nlohmann::json j{{"version", kJsonFormatVersion}, {"epochs", std::move(jlist)}};
    detail::write_text_file(path, j.dump(2) + "\n");
}

inline void save_report_json(const std::filesystem::path& path, const EvalReport& rep) {
    const nlohmann::json j{{"version", kJsonFormatVersion},
                           {"closing_corrected", rep.closing_corrected},
                           {"closing_slam", rep.closing_slam},
                           {"rmse_corrected", rep.rmse_corrected},
                           {"rmse_slam", rep.rmse_slam},
                           {"max_err_corrected", rep.max_err_corrected},
                           {"improvement_factor", rep.improvement_factor}};
    detail::write_text_file(path, j.dump(2) + "\n");
}

namespace detail {

inline std::string fixed1(double v) {
    std::array<char, 32> buf{};
    const int n = std::snprintf(buf.data(), buf.size(), "%.1f", v);
    return std::string(buf.data(), static_cast<std::size_t>(n));
}

}  // namespace detail

// Closing-distance table, meters at decimeter resolution.
inline std::string format_report_table(const std::vector<std::pair<std::string, EvalReport>>& rows) {
    std::ostringstream out;
    out << "scenario        corrected (m)   slam only (m)\n";
    for (const auto& [label, rep] : rows) {
        out << label;
        for (std::size_t i = label.size(); i < 16; ++i) out << ' ';
        std::string c = detail::fixed1(rep.closing_corrected);
        for (std::size_t i = c.size(); i < 13; ++i) out << ' ';
        out << c << "   ";
        std::string s = detail::fixed1(rep.closing_slam);
        for (std::size_t i = s.size(); i < 13; ++i) out << ' ';
        out << s << '\n';
    }
    return out.str();
}

}  // namespace driftcorr::io
