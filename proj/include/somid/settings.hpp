#pragma once

// Maps the sectioned config format onto the simulation / study structs.
// Sections: [noise], [input], [study], [params.true], [params.nominal].

#include "config.hpp"
#include "estim.hpp"
#include "sim.hpp"
#include "study.hpp"
#include "vessel.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace somid {

inline ShipParams params_from_config(const Config& cfg, const std::string& section,
                                     const ShipParams& defaults) {
    Eigen::VectorXd theta = defaults.to_theta();
    const auto& names = ShipParams::names();
    for (int i = 0; i < ShipParams::kCount; ++i)
        theta(i) = cfg.get_double(section, names[i], theta(i));
    return ShipParams::from_theta(theta);
}

inline void params_to_config(Config& cfg, const std::string& section, const ShipParams& p) {
    const Eigen::VectorXd theta = p.to_theta();
    const auto& names = ShipParams::names();
    char buf[40];
    for (int i = 0; i < ShipParams::kCount; ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", theta(i));
        cfg.set(section, names[i], buf);
    }
}

inline NoiseConfig noise_from_config(const Config& cfg) {
    NoiseConfig n;
    auto vec2 = [&](const char* key, Eigen::Vector2d v) {
        const auto vals = cfg.get_doubles("noise", key, {v(0), v(1)});
        if (vals.size() != 2)
            throw std::runtime_error(std::string("config [noise] ") + key +
                                     " needs exactly 2 values");
        return Eigen::Vector2d(vals[0], vals[1]);
    };
    const double e_nu = cfg.get_double("noise", "cov_e_nu", 2e-4);
    n.cov_e_nu.setConstant(e_nu);
    n.var_e_psi = cfg.get_double("noise", "var_e_psi", n.var_e_psi);
    n.current_mean = vec2("current_mean", n.current_mean);
    n.current_cov = cfg.get_double("noise", "current_cov", n.current_cov);
    n.wind_mean = vec2("wind_mean", n.wind_mean);
    n.wind_cov = cfg.get_double("noise", "wind_cov", n.wind_cov);
    n.wind_det_amp = vec2("wind_det_amp", n.wind_det_amp);
    n.wind_det_period = vec2("wind_det_period", n.wind_det_period);
    n.cov_e_aux = cfg.get_double("noise", "cov_e_aux", n.cov_e_aux);
    const double w = cfg.get_double("noise", "cov_w", 0.0);
    n.cov_w.setConstant(w);
    n.validate();
    return n;
}

inline InputDesign input_from_config(const Config& cfg) {
    InputDesign d = InputDesign::circle_offset();
    const std::string mode = cfg.get_string("input", "mode", "circle-offset");
    if (mode == "zigzag-validation")
        d = InputDesign::zigzag_validation();
    else if (mode != "circle-offset")
        throw std::runtime_error("config [input] mode must be circle-offset or "
                                 "zigzag-validation, got '" +
                                 mode + "'");
    auto vec3 = [&](const char* key, Eigen::Vector3d v) {
        const auto vals = cfg.get_doubles("input", key, {v(0), v(1), v(2)});
        if (vals.size() != 3)
            throw std::runtime_error(std::string("config [input] ") + key +
                                     " needs exactly 3 values");
        return Eigen::Vector3d(vals[0], vals[1], vals[2]);
    };
    d.tau_static = vec3("tau_static", d.tau_static);
    d.pulse_amp = vec3("pulse_amp", d.pulse_amp);
    d.width_min = cfg.get_int("input", "pulse_width_min", d.width_min);
    d.width_max = cfg.get_int("input", "pulse_width_max", d.width_max);
    d.smooth_tc = cfg.get_double("input", "smooth_tc", d.smooth_tc);
    d.validate();
    return d;
}

inline StudyConfig study_from_config(const Config& cfg) {
    StudyConfig s;
    {
        std::vector<double> grid_d(s.grid.begin(), s.grid.end());
        const auto grid = cfg.get_doubles("study", "grid", grid_d);
        s.grid.clear();
        for (double g : grid) s.grid.push_back(static_cast<int>(g));
    }
    s.reps = cfg.get_int("study", "reps", s.reps);
    s.wind_cases = cfg.get_doubles("study", "wind", s.wind_cases);
    {
        const auto names = cfg.get_strings("study", "estimators", {"iv1", "iv2", "iv3", "ls"});
        s.estimators.clear();
        for (const auto& n : names) s.estimators.push_back(parse_predictor_kind(n));
    }
    s.master_seed = static_cast<std::uint64_t>(cfg.get_double("study", "seed", 1));
    s.n_e = cfg.get_int("study", "n_e", s.n_e);
    s.n_val = cfg.get_int("study", "n_val", s.n_val);
    s.threads = cfg.get_int("study", "threads", s.threads);
    s.out_dir = cfg.get_string("study", "out_dir", s.out_dir);

    s.noise = noise_from_config(cfg);
    s.estimation_input = input_from_config(cfg);
    s.true_params = params_from_config(cfg, "params.true", ShipParams::truth());
    s.nominal_params = params_from_config(cfg, "params.nominal", ShipParams::nominal());

    s.estim.tol = cfg.get_double("study", "refine_tol", s.estim.tol);
    s.estim.max_iter = cfg.get_int("study", "refine_max_iter", s.estim.max_iter);
    {
        const auto v = cfg.get_doubles("study", "instrument_wind_mean",
                                       {s.estim.instrument_wind_mean(0),
                                        s.estim.instrument_wind_mean(1)});
        if (v.size() != 2)
            throw std::runtime_error("config [study] instrument_wind_mean needs 2 values");
        s.estim.instrument_wind_mean = Eigen::Vector2d(v[0], v[1]);
    }
    s.estim.dt = cfg.get_double("study", "dt", s.estim.dt);
    return s;
}

}  // namespace somid
