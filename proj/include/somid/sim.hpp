#pragma once

// Multi-experiment dataset generation: disturbance sampling, excitation
// input design, Euler propagation and measurement synthesis, plus the
// excitation diagnostics and the CSV dataset format.

#include "rng.hpp"
#include "vessel.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace somid {

/// Moments of every stochastic signal entering an experiment. Covariances
/// are diagonal; the optional deterministic wind component (amplitude and
/// period per axis) rides on top of the wind mean.
struct NoiseConfig {
    Eigen::Vector3d cov_e_nu{2e-4, 2e-4, 2e-4};
    double var_e_psi = 1e-4;
    Eigen::Vector2d current_mean{0.2, 0.2};
    double current_cov = 1e-3;
    Eigen::Vector2d wind_mean{1.0, 1.0};
    double wind_cov = 1e-3;
    Eigen::Vector2d wind_det_amp{0.0, 0.0};
    Eigen::Vector2d wind_det_period{0.0, 0.0};
    double cov_e_aux = 1e-3;
    Eigen::Vector3d cov_w{0.0, 0.0, 0.0};

    void validate() const {
        auto nonneg = [](double v, const char* name) {
            if (!(v >= 0.0))
                throw std::invalid_argument(std::string("noise config: ") + name +
                                            " must be non-negative");
        };
        for (int i = 0; i < 3; ++i) nonneg(cov_e_nu(i), "cov_e_nu");
        nonneg(var_e_psi, "var_e_psi");
        nonneg(current_cov, "current_cov");
        nonneg(wind_cov, "wind_cov");
        nonneg(cov_e_aux, "cov_e_aux");
        for (int i = 0; i < 3; ++i) nonneg(cov_w(i), "cov_w");
    }

    static NoiseConfig noise_free() {
        NoiseConfig n;
        n.cov_e_nu.setZero();
        n.var_e_psi = 0.0;
        n.current_cov = 0.0;
        n.wind_cov = 0.0;
        n.cov_e_aux = 0.0;
        return n;
    }

    static NoiseConfig undisturbed() {
        NoiseConfig n = noise_free();
        n.current_mean.setZero();
        n.wind_mean.setZero();
        return n;
    }
};

/// Excitation input layout. Circle-offset mode drives all three channels
/// with a static offset plus smoothed random-width pulses; zigzag mode keeps
/// a constant forward thrust and alternates the sign of the yaw moment.
struct InputDesign {
    enum class Mode { CircleOffset, ZigzagValidation };

    Mode mode = Mode::CircleOffset;
    Eigen::Vector3d tau_static{1.4, 5.2, 10.5};
    Eigen::Vector3d pulse_amp{0.7, 2.6, 5.25};  // 50% of tau_static channelwise
    int width_min = 50;
    int width_max = 200;
    double smooth_tc = 10.0;

    void validate() const {
        if (width_min < 1 || width_max < width_min)
            throw std::invalid_argument("input design: pulse widths must satisfy 1 <= min <= max");
        if (smooth_tc < 0.0)
            throw std::invalid_argument("input design: smoothing constant must be >= 0");
    }

    static InputDesign circle_offset() { return InputDesign{}; }

    static InputDesign zigzag_validation() {
        InputDesign d;
        d.mode = Mode::ZigzagValidation;
        d.tau_static = Eigen::Vector3d(1.4, 0.0, 0.0);
        d.pulse_amp = Eigen::Vector3d(0.0, 0.0, 10.5);
        return d;
    }
};

/// One experiment: the known input, the measured series and the retained
/// ground truth. Estimators read only the measured block; `truth_present`
/// gates the hidden series.
struct Dataset {
    int n_d = 0;
    std::uint64_t seed = 0;

    std::vector<Eigen::Vector3d> tau;    // input
    std::vector<Eigen::Vector3d> y;      // measured velocities
    std::vector<double> y_psi;           // measured heading
    std::vector<Eigen::Vector3d> y_aux;  // measured wind offset R v2 + e_aux
    bool has_aux = true;

    NoiseConfig noise;  // generating moments (known experiment metadata)

    bool truth_present = false;
    std::vector<Eigen::Vector3d> true_nu;
    std::vector<double> true_psi;
    std::vector<Eigen::Vector2d> true_current_world;
    std::vector<Eigen::Vector2d> true_wind_world;

    /// Measured rotation estimate: first two columns of J^{-1}(y_psi).
    Eigen::Matrix<double, 3, 2> measured_gain(int k) const { return disturbance_gain(y_psi[k]); }

    void strip_truth() {
        truth_present = false;
        true_nu.clear();
        true_psi.clear();
        true_current_world.clear();
        true_wind_world.clear();
    }
};

/// Deterministic input series: static offset plus smoothed pulses.
inline std::vector<Eigen::Vector3d> design_input(const InputDesign& d, int n_d,
                                                 std::uint64_t seed) {
    if (n_d < 1) throw std::invalid_argument("design_input: N_D must be >= 1");
    d.validate();

    std::vector<Eigen::Vector3d> raw(n_d, Eigen::Vector3d::Zero());
    if (d.mode == InputDesign::Mode::CircleOffset) {
        for (int c = 0; c < 3; ++c) {
            Gaussian rng(split_seed(seed, 0x10 + c));
            int k = 0;
            while (k < n_d) {
                const int width = rng.uniform_int(d.width_min, d.width_max);
                const double level = (rng.uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0) * d.pulse_amp(c);
                for (int i = 0; i < width && k < n_d; ++i, ++k) raw[k](c) = level;
            }
        }
    } else {
        // Alternating-sign yaw-moment pulses, channels 1-2 static only.
        Gaussian rng(split_seed(seed, 0x20));
        int k = 0;
        double sign = 1.0;
        while (k < n_d) {
            const int width = rng.uniform_int(d.width_min, d.width_max);
            for (int i = 0; i < width && k < n_d; ++i, ++k) raw[k](2) = sign * d.pulse_amp(2);
            sign = -sign;
        }
    }

    // First-order smoothing, then the static offset.
    const double alpha = d.smooth_tc > 0.0 ? std::exp(-1.0 / d.smooth_tc) : 0.0;
    std::vector<Eigen::Vector3d> out(n_d);
    Eigen::Vector3d state = Eigen::Vector3d::Zero();
    for (int k = 0; k < n_d; ++k) {
        state = alpha * state + (1.0 - alpha) * raw[k];
        out[k] = d.tau_static + state;
    }
    return out;
}

namespace detail {

inline void check_finite_state(const VesselState& st, int k) {
    if (!st.nu.allFinite() || !st.eta.allFinite())
        throw std::runtime_error("simulation diverged to a non-finite state at step " +
                                 std::to_string(k));
}

}  // namespace detail

/// Propagates the true system under the given input and samples every
/// measurement channel. The input is precomputed (open loop). Separate RNG
/// streams drive disturbances and measurement noise so the latter can be
/// regenerated without touching the former.
inline Dataset run_experiment(const ShipParams& params, const InputDesign& design,
                              const NoiseConfig& noise, int n_d, std::uint64_t seed,
                              double dt = 1.0) {
    if (n_d < 1) throw std::invalid_argument("run_experiment: N_D must be >= 1");
    noise.validate();

    static const ShipStructure structure = ship_regressor_spec();

    Dataset ds;
    ds.n_d = n_d;
    ds.seed = seed;
    ds.noise = noise;
    ds.tau = design_input(design, n_d, split_seed(seed, 0xA));
    ds.y.resize(n_d);
    ds.y_psi.resize(n_d);
    ds.y_aux.resize(n_d);
    ds.truth_present = true;
    ds.true_nu.resize(n_d);
    ds.true_psi.resize(n_d);
    ds.true_current_world.resize(n_d);
    ds.true_wind_world.resize(n_d);

    Gaussian dist_rng(split_seed(seed, 0xB));
    Gaussian noise_rng(split_seed(seed, 0xC));
    Gaussian w_rng(split_seed(seed, 0xD));

    const double current_std = std::sqrt(noise.current_cov);
    const double wind_std = std::sqrt(noise.wind_cov);
    const Eigen::Vector3d e_nu_std = noise.cov_e_nu.cwiseSqrt();
    const double e_psi_std = std::sqrt(noise.var_e_psi);
    const double e_aux_std = std::sqrt(noise.cov_e_aux);
    const Eigen::Vector3d w_std = noise.cov_w.cwiseSqrt();

    VesselState st;
    for (int k = 0; k < n_d; ++k) {
        detail::check_finite_state(st, k);

        Eigen::Vector2d cur, wind;
        for (int i = 0; i < 2; ++i) cur(i) = dist_rng.sample(noise.current_mean(i), current_std);
        for (int i = 0; i < 2; ++i) wind(i) = dist_rng.sample(noise.wind_mean(i), wind_std);
        for (int i = 0; i < 2; ++i) {
            if (noise.wind_det_period(i) > 0.0)
                wind(i) += noise.wind_det_amp(i) *
                           std::sin(2.0 * M_PI * k / noise.wind_det_period(i));
        }

        WorldDisturbance wd{cur(0), cur(1), wind(0), wind(1)};
        const auto [nu_c, nu_w] = body_disturbance(st.eta(2), wd);

        ds.true_nu[k] = st.nu;
        ds.true_psi[k] = st.eta(2);
        ds.true_current_world[k] = cur;
        ds.true_wind_world[k] = wind;

        for (int i = 0; i < 3; ++i) ds.y[k](i) = st.nu(i) + noise_rng.sample(0.0, e_nu_std(i));
        ds.y_psi[k] = st.eta(2) + noise_rng.sample(0.0, e_psi_std);
        const Eigen::Vector3d aux_true = -nu_w;  // R v2 with v2 = -world wind components
        for (int i = 0; i < 3; ++i)
            ds.y_aux[k](i) = aux_true(i) + noise_rng.sample(0.0, e_aux_std);

        Eigen::Vector3d w;
        for (int i = 0; i < 3; ++i) w(i) = w_rng.sample(0.0, w_std(i));

        st = ship_step(structure, params, st, ds.tau[k], nu_c, nu_w, w, dt);
    }
    detail::check_finite_state(st, n_d);
    return ds;
}

/// Re-synthesizes the measured series from the retained truth with fresh
/// measurement noise, leaving inputs and disturbances untouched.
inline Dataset regenerate_noise(const Dataset& src, std::uint64_t new_seed) {
    if (!src.truth_present)
        throw std::invalid_argument("regenerate_noise needs the truth block");
    Dataset ds = src;
    Gaussian noise_rng(split_seed(new_seed, 0xC));
    const Eigen::Vector3d e_nu_std = ds.noise.cov_e_nu.cwiseSqrt();
    const double e_psi_std = std::sqrt(ds.noise.var_e_psi);
    const double e_aux_std = std::sqrt(ds.noise.cov_e_aux);
    for (int k = 0; k < ds.n_d; ++k) {
        for (int i = 0; i < 3; ++i)
            ds.y[k](i) = ds.true_nu[k](i) + noise_rng.sample(0.0, e_nu_std(i));
        ds.y_psi[k] = ds.true_psi[k] + noise_rng.sample(0.0, e_psi_std);
        const Eigen::Vector3d aux_true =
            -(disturbance_gain(ds.true_psi[k]) * ds.true_wind_world[k]);
        for (int i = 0; i < 3; ++i)
            ds.y_aux[k](i) = aux_true(i) + noise_rng.sample(0.0, e_aux_std);
    }
    return ds;
}

/// Per-channel excitation diagnostics: how consistently each measured state
/// keeps one sign and how far it stays from the origin. Diagnostics never
/// abort.
struct ExcitationChannel {
    int majority_sign = 0;
    double sign_mismatch_frac = 0.0;   // samples disagreeing with the majority sign
    double min_abs = 0.0;
    double amplitude_violation_frac = 0.0;  // samples with |y| below the margin
    bool flagged = false;
};

struct ExcitationReport {
    std::vector<ExcitationChannel> measured;      // per state channel, from y
    std::vector<ExcitationChannel> with_aux;      // from y + y_aux (when present)
    double amplitude_margin = 0.0;
    double flag_threshold = 0.0;

    bool any_flagged() const {
        for (const auto& c : measured)
            if (c.flagged) return true;
        return false;
    }

    std::string summary() const {
        std::ostringstream os;
        static const char* names[3] = {"surge", "sway", "yaw-rate"};
        for (std::size_t c = 0; c < measured.size(); ++c) {
            const auto& ch = measured[c];
            os << names[c % 3] << ": sign " << (ch.majority_sign >= 0 ? "+" : "-")
               << " mismatch " << 100.0 * ch.sign_mismatch_frac << "%"
               << " min|y| " << ch.min_abs << " amp-violations "
               << 100.0 * ch.amplitude_violation_frac << "%"
               << (ch.flagged ? " [FLAGGED]" : "") << "\n";
        }
        for (std::size_t c = 0; c < with_aux.size(); ++c) {
            const auto& ch = with_aux[c];
            os << names[c % 3] << "+aux: sign " << (ch.majority_sign >= 0 ? "+" : "-")
               << " mismatch " << 100.0 * ch.sign_mismatch_frac << "%"
               << (ch.flagged ? " [FLAGGED]" : "") << "\n";
        }
        return os.str();
    }
};

namespace detail {

inline ExcitationChannel excitation_channel(const std::vector<double>& series, double margin,
                                            double flag_threshold) {
    ExcitationChannel ch;
    double mean = 0.0;
    for (double v : series) mean += v;
    mean /= static_cast<double>(series.size());
    ch.majority_sign = mean > 0.0 ? 1 : (mean < 0.0 ? -1 : 0);
    ch.min_abs = std::abs(series[0]);
    int mismatches = 0, amp_bad = 0;
    for (double v : series) {
        const int s = v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
        if (s != ch.majority_sign || s == 0) ++mismatches;
        ch.min_abs = std::min(ch.min_abs, std::abs(v));
        if (std::abs(v) < margin) ++amp_bad;
    }
    ch.sign_mismatch_frac = static_cast<double>(mismatches) / series.size();
    ch.amplitude_violation_frac = static_cast<double>(amp_bad) / series.size();
    ch.flagged = ch.sign_mismatch_frac > flag_threshold;
    return ch;
}

}  // namespace detail

/// sigma_margin scales the measurement-noise std into the amplitude margin
/// each |y| sample is compared against.
inline ExcitationReport check_excitation(const Dataset& ds, double sigma_margin = 4.0,
                                         double flag_threshold = 0.01) {
    if (ds.n_d < 1) throw std::invalid_argument("check_excitation: empty dataset");
    ExcitationReport rep;
    rep.flag_threshold = flag_threshold;
    for (int c = 0; c < 3; ++c) {
        std::vector<double> series(ds.n_d);
        for (int k = 0; k < ds.n_d; ++k) series[k] = ds.y[k](c);
        const double margin = sigma_margin * std::sqrt(ds.noise.cov_e_nu(c));
        rep.amplitude_margin = std::max(rep.amplitude_margin, margin);
        rep.measured.push_back(detail::excitation_channel(series, margin, flag_threshold));
    }
    if (ds.has_aux) {
        for (int c = 0; c < 3; ++c) {
            std::vector<double> series(ds.n_d);
            for (int k = 0; k < ds.n_d; ++k) series[k] = ds.y[k](c) + ds.y_aux[k](c);
            const double margin =
                sigma_margin * std::sqrt(ds.noise.cov_e_nu(c) + ds.noise.cov_e_aux);
            rep.with_aux.push_back(detail::excitation_channel(series, margin, flag_threshold));
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// CSV dataset format: header row mandatory, 17 significant digits, truth
// block appended only on request.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

inline void write_dataset_csv(const Dataset& ds, const std::string& path,
                              bool include_truth = false) {
    if (include_truth && !ds.truth_present)
        throw std::invalid_argument("dataset has no truth block to export");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset file '" + path + "'");
    out << "k,u1,u2,u3,y1,y2,y3,y_psi,yaux1,yaux2,yaux3";
    if (include_truth) out << ",t_u,t_v,t_r,t_psi,t_cur_ns,t_cur_ew,t_wind_ns,t_wind_ew";
    out << "\n";
    using detail::fmt17;
    for (int k = 0; k < ds.n_d; ++k) {
        out << k;
        for (int i = 0; i < 3; ++i) out << "," << fmt17(ds.tau[k](i));
        for (int i = 0; i < 3; ++i) out << "," << fmt17(ds.y[k](i));
        out << "," << fmt17(ds.y_psi[k]);
        for (int i = 0; i < 3; ++i) out << "," << fmt17(ds.y_aux[k](i));
        if (include_truth) {
            for (int i = 0; i < 3; ++i) out << "," << fmt17(ds.true_nu[k](i));
            out << "," << fmt17(ds.true_psi[k]);
            for (int i = 0; i < 2; ++i) out << "," << fmt17(ds.true_current_world[k](i));
            for (int i = 0; i < 2; ++i) out << "," << fmt17(ds.true_wind_world[k](i));
        }
        out << "\n";
    }
}

inline Dataset read_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file '" + path + "'");
    std::string header;
    if (!std::getline(in, header))
        throw std::runtime_error("dataset file '" + path + "' is empty (header row mandatory)");
    const std::string base = "k,u1,u2,u3,y1,y2,y3,y_psi,yaux1,yaux2,yaux3";
    const std::string with_truth =
        base + ",t_u,t_v,t_r,t_psi,t_cur_ns,t_cur_ew,t_wind_ns,t_wind_ew";
    if (!header.empty() && header.back() == '\r') header.pop_back();
    bool truth = false;
    if (header == with_truth)
        truth = true;
    else if (header != base)
        throw std::runtime_error("dataset file '" + path + "' has an unrecognized header row");

    Dataset ds;
    ds.truth_present = truth;
    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> vals;
        while (std::getline(ls, cell, ',')) {
            try {
                vals.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                         ": bad numeric cell '" + cell + "'");
            }
        }
        const std::size_t expected = truth ? 19 : 11;
        if (vals.size() != expected)
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected " +
                                     std::to_string(expected) + " columns, got " +
                                     std::to_string(vals.size()));
        ds.tau.emplace_back(vals[1], vals[2], vals[3]);
        ds.y.emplace_back(vals[4], vals[5], vals[6]);
        ds.y_psi.push_back(vals[7]);
        ds.y_aux.emplace_back(vals[8], vals[9], vals[10]);
        if (truth) {
            ds.true_nu.emplace_back(vals[11], vals[12], vals[13]);
            ds.true_psi.push_back(vals[14]);
            ds.true_current_world.emplace_back(vals[15], vals[16]);
            ds.true_wind_world.emplace_back(vals[17], vals[18]);
        }
    }
    ds.n_d = static_cast<int>(ds.y.size());
    if (ds.n_d == 0) throw std::runtime_error("dataset file '" + path + "' has no data rows");
    return ds;
}

}  // namespace somid
