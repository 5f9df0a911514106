#pragma once

// 3-DOF marine surface vessel instantiation: the discretized surge/sway/yaw
// regressor structure, the named coefficient set with its two built-in
// presets, planar kinematics and body-frame disturbance transforms.

#include "regressor.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace somid {

/// The 17 coefficients of the discretized (unit-sample) model, in the order
/// they appear in the stacked parameter vector.
struct ShipParams {
    double X_u = 0, X_vr = 0, X_uu = 0, W_uu = 0, X_tau = 0;
    double Y_v = 0, Y_ur = 0, Y_vv = 0, Y_vr = 0, W_vv = 0, Y_tau = 0;
    double N_r = 0, N_uv = 0, N_vv = 0, N_vr = 0, W_uv = 0, N_tau = 0;

    static constexpr int kCount = 17;

    static const std::array<const char*, kCount>& names() {
        static const std::array<const char*, kCount> n = {
            "X_u",   "X_vr",  "X_|u|u", "W_|u|u", "X_tau", "Y_v",   "Y_ur",  "Y_|v|v", "Y_|v|r",
            "W_|v|v", "Y_tau", "N_r",   "N_uv",   "N_|v|v", "N_|v|r", "W_uv", "N_tau"};
        return n;
    }

    Eigen::VectorXd to_theta() const {
        Eigen::VectorXd t(kCount);
        t << X_u, X_vr, X_uu, W_uu, X_tau, Y_v, Y_ur, Y_vv, Y_vr, W_vv, Y_tau, N_r, N_uv, N_vv,
            N_vr, W_uv, N_tau;
        return t;
    }

    static ShipParams from_theta(const Eigen::VectorXd& t) {
        if (t.size() != kCount)
            throw std::invalid_argument("ship parameter vector must have 17 entries");
        ShipParams p;
        p.X_u = t(0);
        p.X_vr = t(1);
        p.X_uu = t(2);
        p.W_uu = t(3);
        p.X_tau = t(4);
        p.Y_v = t(5);
        p.Y_ur = t(6);
        p.Y_vv = t(7);
        p.Y_vr = t(8);
        p.W_vv = t(9);
        p.Y_tau = t(10);
        p.N_r = t(11);
        p.N_uv = t(12);
        p.N_vv = t(13);
        p.N_vr = t(14);
        p.W_uv = t(15);
        p.N_tau = t(16);
        return p;
    }

    /// Data-generating parameter set.
    static ShipParams truth() {
        ShipParams p;
        p.X_u = -0.05;
        p.X_vr = 1.0;
        p.X_uu = -0.05;
        p.W_uu = -0.0005;
        p.X_tau = 0.02;
        p.Y_v = -0.2;
        p.Y_ur = -0.65;
        p.Y_vv = -0.2;
        p.Y_vr = -0.1;
        p.W_vv = -0.0015;
        p.Y_tau = 0.02;
        p.N_r = -0.1;
        p.N_uv = -0.0015;
        p.N_vv = -0.001;
        p.N_vr = -0.04;
        p.W_uv = -0.00003;
        p.N_tau = 0.0003;
        return p;
    }

    /// Crude starting model used to seed the instrument simulation.
    static ShipParams nominal() {
        ShipParams p;
        p.X_u = -0.2;
        p.X_vr = 0.8;
        p.X_uu = 0.0;
        p.W_uu = 0.0;
        p.X_tau = 0.01;
        p.Y_v = -0.3;
        p.Y_ur = -0.8;
        p.Y_vv = 0.0;
        p.Y_vr = 0.0;
        p.W_vv = 0.0;
        p.Y_tau = 0.01;
        p.N_r = -0.15;
        p.N_uv = 0.0;
        p.N_vv = 0.0;
        p.N_vr = 0.0;
        p.W_uv = 0.0;
        p.N_tau = 0.00015;
        return p;
    }

    /// Names of damping coefficients that are positive (non-dissipative);
    /// empty for physically sensible configurations.
    std::vector<std::string> dissipativity_warnings() const {
        std::vector<std::string> bad;
        const std::array<std::pair<const char*, double>, 8> damping = {{{"X_u", X_u},
                                                                        {"X_|u|u", X_uu},
                                                                        {"W_|u|u", W_uu},
                                                                        {"Y_v", Y_v},
                                                                        {"Y_|v|v", Y_vv},
                                                                        {"W_|v|v", W_vv},
                                                                        {"N_r", N_r},
                                                                        {"N_|v|v", N_vv}}};
        for (const auto& [name, value] : damping)
            if (value > 0.0) bad.emplace_back(name);
        return bad;
    }
};

/// Body-frame velocities nu = [u, v, r] and planar pose eta = [x, y, psi].
/// psi is kept unwrapped so the rotation stays continuous in time.
struct VesselState {
    Eigen::Vector3d nu = Eigen::Vector3d::Zero();
    Eigen::Vector3d eta = Eigen::Vector3d::Zero();
};

/// Inertial-frame current and wind components; the rotational component is
/// identically zero.
struct WorldDisturbance {
    double current_ns = 0, current_ew = 0;
    double wind_ns = 0, wind_ew = 0;
};

/// Planar rotation J(psi): body -> inertial on the first two components,
/// identity on the third.
inline Eigen::Matrix3d rotation(double psi) {
    if (!std::isfinite(psi)) throw std::invalid_argument("rotation: non-finite heading");
    const double c = std::cos(psi), s = std::sin(psi);
    Eigen::Matrix3d j;
    j << c, -s, 0, s, c, 0, 0, 0, 1;
    return j;
}

inline Eigen::Matrix3d rotation_inv(double psi) { return rotation(psi).transpose(); }

/// First two columns of J^{-1}(psi): the R(k) through which the planar world
/// disturbances offset the body-frame states. The third row is zero.
inline Eigen::Matrix<double, 3, 2> disturbance_gain(double psi) {
    return rotation_inv(psi).leftCols<2>();
}

/// Body-frame current and wind velocities for heading psi.
inline std::pair<Eigen::Vector3d, Eigen::Vector3d> body_disturbance(double psi,
                                                                    const WorldDisturbance& w) {
    if (!std::isfinite(w.current_ns) || !std::isfinite(w.current_ew) ||
        !std::isfinite(w.wind_ns) || !std::isfinite(w.wind_ew))
        throw std::invalid_argument("body_disturbance: non-finite world components");
    const Eigen::Matrix3d jinv = rotation_inv(psi);
    const Eigen::Vector3d cur = jinv * Eigen::Vector3d(w.current_ns, w.current_ew, 0.0);
    const Eigen::Vector3d wind = jinv * Eigen::Vector3d(w.wind_ns, w.wind_ew, 0.0);
    return {cur, wind};
}

/// Ship regressor structure. The hydrodynamic block evaluates on the
/// current-relative velocity (plus the inputs), the wind block on the
/// wind-relative velocity. Both share the stacked layout [u, v, r, tau1,
/// tau2, tau3]. `merged` is the 14-row structure obtained when every block
/// is evaluated on the same signals: the three wind rows coincide with
/// their hydrodynamic partners and aggregate.
struct ShipStructure {
    RegressorSpec hydro;   // 14 x 3
    RegressorSpec wind;    // 3 x 3
    RegressorSpec merged;  // structurally identical to hydro

    std::vector<int> hydro_theta_pos;  // 0-based positions of hydro rows in the 17-vector
    std::vector<int> wind_theta_pos;
    std::vector<std::string> hydro_labels;
    std::vector<std::string> wind_labels;
    std::vector<std::string> merged_labels;

    /// R entries that are identically zero for the planar rotation.
    static std::vector<std::pair<int, int>> r_structural_zeros() { return {{3, 1}, {3, 2}}; }

    Eigen::VectorXd hydro_theta(const ShipParams& p) const {
        const Eigen::VectorXd full = p.to_theta();
        Eigen::VectorXd out(hydro_theta_pos.size());
        for (std::size_t i = 0; i < hydro_theta_pos.size(); ++i) out(i) = full(hydro_theta_pos[i]);
        return out;
    }
    Eigen::VectorXd wind_theta(const ShipParams& p) const {
        const Eigen::VectorXd full = p.to_theta();
        Eigen::VectorXd out(wind_theta_pos.size());
        for (std::size_t i = 0; i < wind_theta_pos.size(); ++i) out(i) = full(wind_theta_pos[i]);
        return out;
    }
    /// The 14 identifiable combinations when wind rows aggregate onto their
    /// structural partners: the three sums plus the remaining 11 directs.
    Eigen::VectorXd merged_theta(const ShipParams& p) const {
        Eigen::VectorXd t = hydro_theta(p);
        t(2) += p.W_uu;   // X_|u|u + W_|u|u
        t(6) += p.W_vv;   // Y_|v|v + W_|v|v
        t(10) += p.W_uv;  // N_uv + W_uv
        return t;
    }
    ShipParams params_from_blocks(const Eigen::VectorXd& hydro_t,
                                  const Eigen::VectorXd& wind_t) const {
        Eigen::VectorXd full = Eigen::VectorXd::Zero(ShipParams::kCount);
        for (std::size_t i = 0; i < hydro_theta_pos.size(); ++i) full(hydro_theta_pos[i]) = hydro_t(i);
        for (std::size_t i = 0; i < wind_theta_pos.size(); ++i) full(wind_theta_pos[i]) = wind_t(i);
        return ShipParams::from_theta(full);
    }
    /// Merged estimate rendered as a simulable parameter set: wind slots zero,
    /// aggregated values in the hydrodynamic slots. Undisturbed simulation of
    /// this set reproduces the merged model exactly.
    ShipParams params_from_merged(const Eigen::VectorXd& merged_t) const {
        return params_from_blocks(merged_t, Eigen::VectorXd::Zero(3));
    }
};

inline ShipStructure ship_regressor_spec() {
    ShipStructure s;
    s.hydro = RegressorSpec::zeros(14, 3, 3, 3);
    // surge: u_r, v_r * r, u_r|u_r|, tau1
    s.hydro.at(0, 0) = TermKind::linear(1);
    s.hydro.at(1, 0) = TermKind::cross(2, 3);
    s.hydro.at(2, 0) = TermKind::cross_abs(1, 1);
    s.hydro.at(3, 0) = TermKind::linear(4);
    // sway: v_r, u_r * r, v_r|v_r|, r|v_r|, tau2
    s.hydro.at(4, 1) = TermKind::linear(2);
    s.hydro.at(5, 1) = TermKind::cross(1, 3);
    s.hydro.at(6, 1) = TermKind::cross_abs(2, 2);
    s.hydro.at(7, 1) = TermKind::cross_abs(3, 2);
    s.hydro.at(8, 1) = TermKind::linear(5);
    // yaw: r, u_r * v_r, v_r|v_r|, r|v_r|, tau3
    s.hydro.at(9, 2) = TermKind::linear(3);
    s.hydro.at(10, 2) = TermKind::cross(1, 2);
    s.hydro.at(11, 2) = TermKind::cross_abs(2, 2);
    s.hydro.at(12, 2) = TermKind::cross_abs(3, 2);
    s.hydro.at(13, 2) = TermKind::linear(6);

    s.wind = RegressorSpec::zeros(3, 3, 3, 3);
    s.wind.at(0, 0) = TermKind::cross_abs(1, 1);  // u_q|u_q|
    s.wind.at(1, 1) = TermKind::cross_abs(2, 2);  // v_q|v_q|
    s.wind.at(2, 2) = TermKind::cross(1, 2);      // u_q * v_q

    s.merged = s.hydro;

    s.hydro_theta_pos = {0, 1, 2, 4, 5, 6, 7, 8, 10, 11, 12, 13, 14, 16};
    s.wind_theta_pos = {3, 9, 15};
    const auto& names = ShipParams::names();
    for (int pos : s.hydro_theta_pos) s.hydro_labels.emplace_back(names[pos]);
    for (int pos : s.wind_theta_pos) s.wind_labels.emplace_back(names[pos]);
    s.merged_labels = s.hydro_labels;
    s.merged_labels[2] = "X_|u|u+W_|u|u";
    s.merged_labels[6] = "Y_|v|v+W_|v|v";
    s.merged_labels[10] = "N_uv+W_uv";
    return s;
}

/// One Euler step of the discretized dynamics: the velocity increment from
/// both regressor blocks plus additive process noise, and the planar
/// kinematics for the pose. dt scales the increments; the shipped
/// configuration uses dt = 1.
inline Eigen::Vector3d ship_increment(const ShipStructure& s, const ShipParams& p,
                                      const Eigen::Vector3d& nu_r, const Eigen::Vector3d& nu_q,
                                      const Eigen::Vector3d& tau) {
    return eval_som(s.hydro, s.hydro_theta(p), nu_r, tau) +
           eval_som(s.wind, s.wind_theta(p), nu_q, tau);
}

inline VesselState ship_step(const ShipStructure& s, const ShipParams& p, const VesselState& st,
                             const Eigen::Vector3d& tau, const Eigen::Vector3d& nu_c,
                             const Eigen::Vector3d& nu_w,
                             const Eigen::Vector3d& w = Eigen::Vector3d::Zero(),
                             double dt = 1.0) {
    VesselState next;
    next.nu = st.nu + dt * ship_increment(s, p, st.nu - nu_c, st.nu - nu_w, tau) + w;
    next.eta = st.eta + dt * (rotation(st.eta(2)) * st.nu);
    return next;
}

}  // namespace somid
