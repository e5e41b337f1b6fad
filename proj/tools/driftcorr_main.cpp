// driftcorr: correct SLAM/VIO-estimated planar trajectories against
// traversable-path map priors.
//
// Subcommands:
//   dt        rasterize a polyline map and build a truncated distance field
//   simulate  generate a synthetic scenario (truth + drifted SLAM input)
//   correct   run the per-epoch drift correction over a trajectory
//   eval      compare corrected / SLAM trajectories against a reference
//   plot      render trajectories (and optionally a field) to SVG
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "driftcorr/corrector.hpp"
#include "driftcorr/geometry.hpp"
#include "driftcorr/io.hpp"
#include "driftcorr/simulator.hpp"
#include "driftcorr/svg.hpp"
#include "driftcorr/worldmap.hpp"

namespace fs = std::filesystem;
using namespace driftcorr;

namespace {

struct DtArgs {
    std::string map_path;
    std::string out_dir = ".";
    std::string config_path;
    double cell_size = 0.0;
    double d_max = 0.0;
    double padding = -1.0;
    bool has_cell = false, has_dmax = false, has_padding = false;
};

int cmd_dt(const DtArgs& a) {
    io::RunConfig cfg;
    if (!a.config_path.empty()) cfg = io::load_config(a.config_path);
    if (a.has_cell) cfg.cell_size = a.cell_size;
    if (a.has_dmax) cfg.d_max = a.d_max;
    if (a.has_padding) cfg.padding = a.padding;

    const PolylineMap map = io::load_map_json(a.map_path);
    const RasterSpec spec = spec_for_map(map, cfg.cell_size, cfg.effective_padding());
    const OccupancyGrid grid = rasterize(map, spec);
    const DistanceField field = distance_transform(grid, cfg.d_max);

    fs::create_directories(a.out_dir);
    const fs::path out = fs::path(a.out_dir) / "field.dfld";
    io::save_field(out, field);

    std::size_t path_cells = 0;
    for (auto c : grid.cells) path_cells += c;
    std::printf("field: %dx%d cells, cell %g m, d_max %g m, origin (%g, %g)\n", spec.width,
                spec.height, spec.cell_size, field.d_max, spec.origin.x, spec.origin.y);
    std::printf("path cells: %zu of %zu\n", path_cells, grid.cells.size());
    std::printf("wrote %s\n", out.string().c_str());
    return 0;
}

struct SimArgs {
    std::string kind = "straight";
    double length = 500.0;
    double step = 1.0;
    double segment = 100.0;
    double heading_bias = 0.0;
    double scale_bias = 1.0;
    double angle_noise = 0.0;
    double mag_noise = 0.0;
    double lateral_offset = 0.0;
    std::uint64_t seed = 0;
    std::string out_dir;
};

int cmd_simulate(const SimArgs& a) {
    DriftModel drift;
    drift.heading_rate_bias = a.heading_bias;
    drift.scale_bias = a.scale_bias;
    drift.angle_noise_std = a.angle_noise;
    drift.magnitude_noise_std = a.mag_noise;
    drift.seed = a.seed;

    const Scenario sc = make_scenario(path_kind_from_string(a.kind), a.length, a.step, drift,
                                      a.segment, a.lateral_offset);
    const Trajectory slam = inject_drift(sc.truth, drift);
    io::write_scenario_dir(a.out_dir, sc, slam, a.step);

    std::printf("scenario %s: %zu epochs, drift closing %.1f m\n", sc.name.c_str(),
                sc.truth.points.size() - 1, closing_distance(slam, sc.truth));
    std::printf("wrote %s/{map.json,truth.csv,slam.csv,scenario.json}\n", a.out_dir.c_str());
    return 0;
}

struct CorrectArgs {
    std::string traj_path;
    std::string field_path;
    std::string config_path;
    std::string reference_path;
    std::string out_dir = ".";
    double x0 = 0.0, y0 = 0.0, heading0 = 0.0;
    bool has_x0 = false, has_y0 = false, has_heading0 = false;
    bool anchor_slam = false;
    std::vector<double> sigma;
    std::vector<double> weight;
    double lr = 0.0;
    int max_iters = 0;
    bool has_lr = false, has_max_iters = false, has_anchor = false;
};

int cmd_correct(const CorrectArgs& a) {
    io::RunConfig cfg;
    if (!a.config_path.empty()) cfg = io::load_config(a.config_path);
    if (!a.sigma.empty()) {
        if (a.sigma.size() != 4) throw io::data_error("--sigma needs exactly 4 values");
        cfg.priors.sigma1 = a.sigma[0];
        cfg.priors.sigma2 = a.sigma[1];
        cfg.priors.sigma3 = a.sigma[2];
        cfg.priors.sigma4 = a.sigma[3];
    }
    if (!a.weight.empty()) {
        if (a.weight.size() != 4) throw io::data_error("--weight needs exactly 4 values");
        cfg.priors.w1 = a.weight[0];
        cfg.priors.w2 = a.weight[1];
        cfg.priors.w3 = a.weight[2];
        cfg.priors.w4 = a.weight[3];
    }
    if (a.has_lr) cfg.solver.learning_rate = a.lr;
    if (a.has_max_iters) cfg.solver.max_iters = a.max_iters;
    if (a.has_anchor) cfg.solver.anchor_alpha_to_slam = a.anchor_slam;

    const Trajectory slam = io::load_trajectory_csv(a.traj_path);
    const DistanceField field = io::load_field(a.field_path);
    if (slam.points.size() < 3)
        throw io::data_error(a.traj_path + ": need at least 3 points to correct");

    InitialConditions init = initial_conditions_from(slam);
    if (a.has_x0) init.p0.x = a.x0;
    if (a.has_y0) init.p0.y = a.y0;
    if (a.has_heading0) init.heading0 = a.heading0;

    const CorrectionResult result =
        correct_trajectory(slam, init, field, cfg.priors, cfg.solver);

    fs::create_directories(a.out_dir);
    io::save_trajectory_csv(fs::path(a.out_dir) / "corrected.csv", result.corrected);
    io::save_epochs_json(fs::path(a.out_dir) / "epochs.json", result.epochs);

    std::size_t converged = 0;
    long total_iters = 0;
    for (const EpochSolve& e : result.epochs) {
        converged += e.converged ? 1 : 0;
        total_iters += e.iterations;
    }
    std::printf("corrected %zu epochs: %.1f%% converged, %.1f iterations/epoch\n",
                result.epochs.size(), 100.0 * converged / result.epochs.size(),
                static_cast<double>(total_iters) / result.epochs.size());

    if (!a.reference_path.empty()) {
        const Trajectory reference = io::load_trajectory_csv(a.reference_path);
        const auto series = angular_series(slam, initial_conditions_from(slam).heading0);
        const Trajectory slam_recon = integrate(init, series);
        const double closing_corr = closing_distance(result.corrected, reference);
        const double closing_slam = closing_distance(slam_recon, reference);
        std::printf("closing distance: corrected %.1f m, slam only %.1f m, improvement %.1fx\n",
                    closing_corr, closing_slam, closing_slam / std::max(closing_corr, 1e-9));
    }
    std::printf("wrote %s/corrected.csv, %s/epochs.json\n", a.out_dir.c_str(), a.out_dir.c_str());
    return 0;
}

struct EvalArgs {
    std::string corrected_path, slam_path, reference_path;
    std::string out_dir = ".";
    std::string label = "scenario";
};

int cmd_eval(const EvalArgs& a) {
    const Trajectory corrected = io::load_trajectory_csv(a.corrected_path);
    const Trajectory slam = io::load_trajectory_csv(a.slam_path);
    const Trajectory reference = io::load_trajectory_csv(a.reference_path);
    EvalReport rep;
    try {
        rep = evaluate(corrected, slam, reference);
    } catch (const std::invalid_argument& e) {
        throw io::data_error(e.what());
    }

    fs::create_directories(a.out_dir);
    io::save_report_json(fs::path(a.out_dir) / "report.json", rep);
    std::fputs(io::format_report_table({{a.label, rep}}).c_str(), stdout);
    std::printf("rmse: corrected %.2f m, slam %.2f m; max err corrected %.2f m; improvement %.1fx\n",
                rep.rmse_corrected, rep.rmse_slam, rep.max_err_corrected, rep.improvement_factor);
    return 0;
}

struct PlotArgs {
    std::vector<std::string> traj_paths;
    std::string field_path;
    std::string out_dir = ".";
    double width = 800.0;
};

int cmd_plot(const PlotArgs& a) {
    std::vector<svg::PlotSeries> series;
    for (const std::string& path : a.traj_paths)
        series.push_back({fs::path(path).stem().string(), io::load_trajectory_csv(path)});

    DistanceField field;
    const bool has_field = !a.field_path.empty();
    if (has_field) field = io::load_field(a.field_path);

    std::string doc;
    try {
        doc = svg::render_plot(series, has_field ? &field : nullptr, a.width);
    } catch (const std::invalid_argument& e) {
        throw io::data_error(e.what());
    }
    fs::create_directories(a.out_dir);
    const fs::path out = fs::path(a.out_dir) / "plot.svg";
    io::detail::write_text_file(out, doc);
    std::printf("wrote %s\n", out.string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"drift correction for planar SLAM/VIO trajectories"};
    app.require_subcommand(1);

    DtArgs dt;
    auto* cdt = app.add_subcommand("dt", "build a distance field from a map");
    cdt->add_option("--map", dt.map_path, "map JSON file")->required();
    cdt->add_option("--out", dt.out_dir, "output directory");
    cdt->add_option("--config", dt.config_path, "config JSON file");
    cdt->add_option("--cell-size", dt.cell_size, "cell size, meters");
    cdt->add_option("--dmax", dt.d_max, "truncation radius, meters");
    cdt->add_option("--padding", dt.padding, "extent padding, meters");

    SimArgs sim;
    auto* csim = app.add_subcommand("simulate", "generate a synthetic scenario");
    csim->add_option("--kind", sim.kind, "straight | l_turns | loop");
    csim->add_option("--length", sim.length, "path length, meters")->required();
    csim->add_option("--step", sim.step, "epoch spacing, meters");
    csim->add_option("--segment", sim.segment, "l_turns leg length, meters");
    csim->add_option("--heading-bias", sim.heading_bias, "rad per epoch");
    csim->add_option("--scale-bias", sim.scale_bias, "magnitude multiplier");
    csim->add_option("--angle-noise", sim.angle_noise, "rad std per epoch");
    csim->add_option("--mag-noise", sim.mag_noise, "meter std per epoch");
    csim->add_option("--lateral-offset", sim.lateral_offset, "truth offset from centerline, m");
    csim->add_option("--seed", sim.seed, "random seed");
    csim->add_option("--out", sim.out_dir, "output directory")->required();

    CorrectArgs corr;
    auto* ccorr = app.add_subcommand("correct", "correct a SLAM trajectory");
    ccorr->add_option("--traj", corr.traj_path, "SLAM trajectory CSV")->required();
    ccorr->add_option("--field", corr.field_path, "distance field DFLD")->required();
    ccorr->add_option("--config", corr.config_path, "config JSON file");
    ccorr->add_option("--reference", corr.reference_path, "reference CSV for the summary");
    ccorr->add_option("--out", corr.out_dir, "output directory");
    auto* ox0 = ccorr->add_option("--x0", corr.x0, "initial x, meters");
    auto* oy0 = ccorr->add_option("--y0", corr.y0, "initial y, meters");
    auto* oh0 = ccorr->add_option("--heading0", corr.heading0, "initial heading, rad");
    ccorr->add_option("--sigma", corr.sigma, "sigma1..sigma4 overrides")->expected(4);
    ccorr->add_option("--weight", corr.weight, "w1..w4 overrides")->expected(4);
    auto* olr = ccorr->add_option("--lr", corr.lr, "learning rate");
    auto* omi = ccorr->add_option("--max-iters", corr.max_iters, "solver iteration cap");
    auto* oan = ccorr->add_flag("--anchor-slam", corr.anchor_slam,
                                "anchor alpha to the dead-reckoned SLAM heading");

    EvalArgs ev;
    auto* ceval = app.add_subcommand("eval", "evaluate against a reference");
    ceval->add_option("--corrected", ev.corrected_path, "corrected CSV")->required();
    ceval->add_option("--slam", ev.slam_path, "SLAM-only CSV")->required();
    ceval->add_option("--reference", ev.reference_path, "reference CSV")->required();
    ceval->add_option("--out", ev.out_dir, "output directory");
    ceval->add_option("--label", ev.label, "row label for the table");

    PlotArgs plot;
    auto* cplot = app.add_subcommand("plot", "render trajectories to SVG");
    cplot->add_option("trajectories", plot.traj_paths, "trajectory CSV files (reference, corrected, slam)")
        ->required();
    cplot->add_option("--field", plot.field_path, "distance field DFLD to shade");
    cplot->add_option("--out", plot.out_dir, "output directory");
    cplot->add_option("--width", plot.width, "canvas width, pixels");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    dt.has_cell = cdt->count("--cell-size") > 0;
    dt.has_dmax = cdt->count("--dmax") > 0;
    dt.has_padding = cdt->count("--padding") > 0;
    corr.has_x0 = ox0->count() > 0;
    corr.has_y0 = oy0->count() > 0;
    corr.has_heading0 = oh0->count() > 0;
    corr.has_lr = olr->count() > 0;
    corr.has_max_iters = omi->count() > 0;
    corr.has_anchor = oan->count() > 0;

    try {
        if (cdt->parsed()) return cmd_dt(dt);
        if (csim->parsed()) return cmd_simulate(sim);
        if (ccorr->parsed()) return cmd_correct(corr);
        if (ceval->parsed()) return cmd_eval(ev);
        if (cplot->parsed()) return cmd_plot(plot);
    } catch (const io::data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}
