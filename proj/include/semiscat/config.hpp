#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "semiscat/errors.hpp"

namespace semiscat {

/// Experiment configuration: a flat key/value file plus CLI overrides.
/// Exactly one h-grid form may be present for the sweep commands: an
/// explicit list, an inverse-h range with a point count, or a log range.
struct ExperimentConfig {
    std::string command;  // reflect | appendix-compare | b1-check | ray | classify

    double alpha = 0.5;

    std::vector<double> h_list;  // explicit h values
    double h_inv_min = 0.0, h_inv_max = 0.0;  // uniform grid in 1/h
    double h_log_min = 0.0, h_log_max = 0.0;  // log grid endpoints in h
    int points = 0;

    std::string potential = "conormal";  // conormal | zero
    double x0 = 0.5, x1 = 1.0;

    double rel_tol = 1e-12, abs_tol = 1e-12;
    double max_step_per_wavelength = 10.0;
    double eta = 0.0;  // 0 = midpoint of the admissible matching window

    std::string spec = "barrier";
    std::vector<double> seed;  // x, y.., xi, eta..
    int depth = 2;
    double s_max = 3.0;
    double strength_cap = 1e9;

    std::string out;
    int jobs = 1;
    bool conjectural = false;

    double y_min = 50.0, y_max = 500.0;
    int y_points = 40;
};

namespace cfg_detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for " + key + ": '" + v + "'");
    }
}

inline int to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const int x = std::stoi(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad integer value for " + key + ": '" + v + "'");
    }
}

inline bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: bad boolean value for " + key + ": '" + v + "'");
}

inline std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(to_double(key, item));
    }
    return out;
}

inline std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += fmt(v[i]);
    }
    return s;
}

}  // namespace cfg_detail

/// Applies one key = value assignment. Unknown keys are errors.
inline void config_set(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    using namespace cfg_detail;
    if (key == "command") cfg.command = value;
    else if (key == "alpha") cfg.alpha = to_double(key, value);
    else if (key == "h_list") cfg.h_list = to_list(key, value);
    else if (key == "h_inv_min") cfg.h_inv_min = to_double(key, value);
    else if (key == "h_inv_max") cfg.h_inv_max = to_double(key, value);
    else if (key == "h_log_min") cfg.h_log_min = to_double(key, value);
    else if (key == "h_log_max") cfg.h_log_max = to_double(key, value);
    else if (key == "points") cfg.points = to_int(key, value);
    else if (key == "potential") cfg.potential = value;
    else if (key == "x0") cfg.x0 = to_double(key, value);
    else if (key == "x1") cfg.x1 = to_double(key, value);
    else if (key == "rel_tol") cfg.rel_tol = to_double(key, value);
    else if (key == "abs_tol") cfg.abs_tol = to_double(key, value);
    else if (key == "max_step_per_wavelength") cfg.max_step_per_wavelength = to_double(key, value);
    else if (key == "eta") cfg.eta = to_double(key, value);
    else if (key == "spec") cfg.spec = value;
    else if (key == "seed") cfg.seed = to_list(key, value);
    else if (key == "depth") cfg.depth = to_int(key, value);
    else if (key == "s_max") cfg.s_max = to_double(key, value);
    else if (key == "strength_cap") cfg.strength_cap = to_double(key, value);
    else if (key == "out") cfg.out = value;
    else if (key == "jobs") cfg.jobs = to_int(key, value);
    else if (key == "conjectural") cfg.conjectural = to_bool(key, value);
    else if (key == "y_min") cfg.y_min = to_double(key, value);
    else if (key == "y_max") cfg.y_max = to_double(key, value);
    else if (key == "y_points") cfg.y_points = to_int(key, value);
    else throw ConfigError("config: unknown key '" + key + "'");
}

/// Parses the flat key = value format ('#' comments, blank lines allowed).
inline ExperimentConfig parse_config_text(const std::string& text) {
    using cfg_detail::trim;
    ExperimentConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        config_set(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

/// Serializes every semantic field (defaults included) in a fixed order;
/// parse(serialize(cfg)) reproduces cfg.
inline std::string serialize_config(const ExperimentConfig& cfg) {
    using cfg_detail::fmt;
    std::string s;
    auto put = [&](const std::string& k, const std::string& v) { s += k + " = " + v + "\n"; };
    put("command", cfg.command);
    put("alpha", fmt(cfg.alpha));
    if (!cfg.h_list.empty()) put("h_list", fmt(cfg.h_list));
    put("h_inv_min", fmt(cfg.h_inv_min));
    put("h_inv_max", fmt(cfg.h_inv_max));
    put("h_log_min", fmt(cfg.h_log_min));
    put("h_log_max", fmt(cfg.h_log_max));
    put("points", std::to_string(cfg.points));
    put("potential", cfg.potential);
    put("x0", fmt(cfg.x0));
    put("x1", fmt(cfg.x1));
    put("rel_tol", fmt(cfg.rel_tol));
    put("abs_tol", fmt(cfg.abs_tol));
    put("max_step_per_wavelength", fmt(cfg.max_step_per_wavelength));
    put("eta", fmt(cfg.eta));
    put("spec", cfg.spec);
    if (!cfg.seed.empty()) put("seed", fmt(cfg.seed));
    put("depth", std::to_string(cfg.depth));
    put("s_max", fmt(cfg.s_max));
    put("strength_cap", fmt(cfg.strength_cap));
    if (!cfg.out.empty()) put("out", cfg.out);
    put("jobs", std::to_string(cfg.jobs));
    put("conjectural", cfg.conjectural ? "true" : "false");
    put("y_min", fmt(cfg.y_min));
    put("y_max", fmt(cfg.y_max));
    put("y_points", std::to_string(cfg.y_points));
    return s;
}

/// Materializes the h grid, ordered by ascending 1/h (descending h).
/// Enforces that exactly one grid form is present.
inline std::vector<double> materialize_h_grid(const ExperimentConfig& cfg) {
    const bool has_list = !cfg.h_list.empty();
    const bool has_inv = cfg.h_inv_min > 0.0 || cfg.h_inv_max > 0.0;
    const bool has_log = cfg.h_log_min > 0.0 || cfg.h_log_max > 0.0;
    const int forms = int(has_list) + int(has_inv) + int(has_log);
    if (forms != 1)
        throw ConfigError("config: exactly one h grid form required (h_list | h_inv_* | h_log_*)");

    std::vector<double> h;
    if (has_list) {
        h = cfg.h_list;
        for (double v : h)
            if (!(v > 0.0)) throw ConfigError("config: h values must be positive");
    } else if (has_inv) {
        if (!(cfg.h_inv_min > 0.0 && cfg.h_inv_max > cfg.h_inv_min))
            throw ConfigError("config: need 0 < h_inv_min < h_inv_max");
        if (cfg.points < 2) throw ConfigError("config: points must be >= 2 for a range");
        for (int i = 0; i < cfg.points; ++i) {
            const double hinv =
                cfg.h_inv_min + (cfg.h_inv_max - cfg.h_inv_min) * i / (cfg.points - 1.0);
            h.push_back(1.0 / hinv);
        }
    } else {
        if (!(cfg.h_log_min > 0.0 && cfg.h_log_max > 0.0))
            throw ConfigError("config: h_log endpoints must be positive");
        if (cfg.points < 2) throw ConfigError("config: points must be >= 2 for a range");
        const double la = std::log10(cfg.h_log_min), lb = std::log10(cfg.h_log_max);
        for (int i = 0; i < cfg.points; ++i)
            h.push_back(std::pow(10.0, la + (lb - la) * i / (cfg.points - 1.0)));
    }
    std::sort(h.begin(), h.end(), std::greater<>());  // 1/h ascending
    return h;
}

}  // namespace semiscat
