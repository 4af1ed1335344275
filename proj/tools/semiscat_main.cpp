// semiscat: semiclassical reflection sweeps and GBB ray tracing from the
// command line. `semiscat <command> [config-file] [flags]`; flags override
// config-file keys. Exit codes: 0 ok, 1 partial failure, 2 config error.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "semiscat/config.hpp"
#include "semiscat/experiments.hpp"

int main(int argc, char** argv) {
    CLI::App app{"semiclassical scattering and ray-splitting laboratory"};
    app.get_formatter()->column_width(34);

    std::string command, config_path;
    app.add_option("command", command, "reflect | appendix-compare | b1-check | ray | classify")
        ->required();
    app.add_option("config", config_path, "flat key = value config file (optional)");

    double alpha = 0, h_inv_min = 0, h_inv_max = 0, h_log_min = 0, h_log_max = 0;
    double x0 = 0, x1 = 0, eta = 0;
    int points = 0, depth = 0, jobs = 0;
    std::string spec, out;
    bool conjectural = false;

    auto* o_alpha = app.add_option("--alpha", alpha, "conormal order of the potential");
    auto* o_him = app.add_option("--h-inv-min", h_inv_min, "smallest 1/h of the uniform grid");
    auto* o_hix = app.add_option("--h-inv-max", h_inv_max, "largest 1/h of the uniform grid");
    auto* o_pts = app.add_option("--points", points, "number of grid points");
    auto* o_hlm = app.add_option("--h-log-min", h_log_min, "first h of the log grid");
    auto* o_hlx = app.add_option("--h-log-max", h_log_max, "last h of the log grid");
    auto* o_x0 = app.add_option("--x0", x0, "end of the pure-power region");
    auto* o_x1 = app.add_option("--x1", x1, "end of the potential support");
    auto* o_eta = app.add_option("--eta", eta, "matching exponent (0 = window midpoint)");
    auto* o_spec = app.add_option("--spec", spec, "demo spec: barrier | remark36 | glancing-detach");
    auto* o_depth = app.add_option("--depth", depth, "maximum GBB branching depth");
    auto* o_out = app.add_option("--out", out, "output file path");
    auto* o_jobs = app.add_option("--jobs", jobs, "worker threads for sweeps");
    auto* o_conj = app.add_flag("--conjectural", conjectural,
                                "allow alpha >= 1 in appendix-compare");

    CLI11_PARSE(app, argc, argv);

    try {
        semiscat::ExperimentConfig cfg;
        if (!config_path.empty()) cfg = semiscat::parse_config_file(config_path);
        cfg.command = command;
        if (*o_alpha) cfg.alpha = alpha;
        if (*o_him) cfg.h_inv_min = h_inv_min;
        if (*o_hix) cfg.h_inv_max = h_inv_max;
        if (*o_pts) cfg.points = points;
        if (*o_hlm) cfg.h_log_min = h_log_min;
        if (*o_hlx) cfg.h_log_max = h_log_max;
        if (*o_x0) cfg.x0 = x0;
        if (*o_x1) cfg.x1 = x1;
        if (*o_eta) cfg.eta = eta;
        if (*o_spec) cfg.spec = spec;
        if (*o_depth) cfg.depth = depth;
        if (*o_out) cfg.out = out;
        if (*o_jobs) cfg.jobs = jobs;
        if (*o_conj) cfg.conjectural = conjectural;

        return semiscat::run_command(cfg, std::cout);
    } catch (const semiscat::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const semiscat::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
