#pragma once

// The four ship estimators: basic IV, augmented IV with nuisance rows,
// augmented IV with auxiliary wind measurements, and the least-squares
// baseline. Instruments come from noise-free nominal-model simulation with
// per-experiment mean subtraction; IV refinement re-simulates them from the
// latest estimate until the parameters settle.

#include "augment.hpp"
#include "sim.hpp"
#include "vessel.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace somid {

enum class PredictorKind { Basic, Augmented, AugmentedWithAux, LeastSquaresAux };

inline const char* predictor_kind_name(PredictorKind k) {
    switch (k) {
        case PredictorKind::Basic: return "iv1";
        case PredictorKind::Augmented: return "iv2";
        case PredictorKind::AugmentedWithAux: return "iv3";
        case PredictorKind::LeastSquaresAux: return "ls";
    }
    return "?";
}

inline PredictorKind parse_predictor_kind(const std::string& name) {
    if (name == "iv1" || name == "basic") return PredictorKind::Basic;
    if (name == "iv2" || name == "augmented") return PredictorKind::Augmented;
    if (name == "iv3" || name == "aux") return PredictorKind::AugmentedWithAux;
    if (name == "ls") return PredictorKind::LeastSquaresAux;
    throw std::invalid_argument("unknown estimator '" + name +
                                "' (expected iv1, iv2, iv3 or ls)");
}

struct EstimOptions {
    double tol = 1e-6;
    int max_iter = 20;
    /// Nominal world wind magnitude used for the simulated aux offset inside
    /// the instruments; modulated piecewise so the wind instrument rows stay
    /// linearly independent of the base rows.
    Eigen::Vector2d instrument_wind_mean{1.0, 1.0};
    int instrument_segments = 8;
    double dt = 1.0;
};

/// Thrown when the stacked instrument-regressor correlation loses rank; the
/// estimator cannot separate the parameters on this data.
struct RankDeficiencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Per-channel sign of the time-averaged measurement. Errors out on an
/// exactly zero average: the experiment lacks the excitation offset the
/// modulus expansion needs.
inline SignPattern infer_sign_pattern(const Dataset& ds) {
    if (ds.n_d < 1) throw std::invalid_argument("infer_sign_pattern: empty dataset");
    SignPattern s;
    s.state_signs.resize(3);
    for (int c = 0; c < 3; ++c) {
        double mean = 0.0;
        for (int k = 0; k < ds.n_d; ++k) mean += ds.y[k](c);
        mean /= ds.n_d;
        if (mean == 0.0)
            throw std::runtime_error(
                "measured channel " + std::to_string(c + 1) +
                " averages exactly zero; an excitation offset is required");
        s.state_signs[c] = mean > 0.0 ? 1 : -1;
    }
    return s;
}

inline std::vector<SignPattern> infer_sign_patterns(std::span<const Dataset> datasets) {
    std::vector<SignPattern> out;
    out.reserve(datasets.size());
    for (const auto& ds : datasets) out.push_back(infer_sign_pattern(ds));
    return out;
}

/// Row layout of one predictor: base block, optional rho/lambda blocks,
/// optional wind block on y + y_aux. Basic and Augmented use the merged
/// 14-row structure (the wind rows aggregate onto their hydrodynamic
/// partners when every block sees the same signals); the aux kinds keep the
/// separate 17-parameter layout.
struct PredictorStructure {
    PredictorKind kind = PredictorKind::Basic;
    ShipStructure ship;
    bool merged = true;
    bool augmented = false;
    bool has_aux = false;
    AugmentedStructure aug;  // populated when augmented

    int n_base = 0, n_rho = 0, n_lambda = 0, n_aux = 0;
    int rows() const { return n_base + n_rho + n_lambda + n_aux; }

    std::vector<std::string> base_labels;
    std::vector<std::string> rho_labels, lambda_labels, aux_labels;

    std::vector<std::string> beta_labels() const {
        std::vector<std::string> all = base_labels;
        all.insert(all.end(), rho_labels.begin(), rho_labels.end());
        all.insert(all.end(), lambda_labels.begin(), lambda_labels.end());
        all.insert(all.end(), aux_labels.begin(), aux_labels.end());
        return all;
    }
};

inline PredictorStructure build_predictor_structure(PredictorKind kind,
                                                    std::span<const SignPattern> signs) {
    PredictorStructure ps;
    ps.kind = kind;
    ps.ship = ship_regressor_spec();
    ps.merged = (kind == PredictorKind::Basic || kind == PredictorKind::Augmented);
    ps.augmented = (kind != PredictorKind::Basic);
    ps.has_aux =
        (kind == PredictorKind::AugmentedWithAux || kind == PredictorKind::LeastSquaresAux);

    const RegressorSpec& base = ps.merged ? ps.ship.merged : ps.ship.hydro;
    ps.n_base = base.n_theta;
    ps.base_labels = ps.merged ? ps.ship.merged_labels : ps.ship.hydro_labels;

    if (ps.augmented) {
        ps.aug = derive_augmented(base, signs, 2, ShipStructure::r_structural_zeros());
        ps.n_rho = ps.aug.n_rho();
        ps.n_lambda = ps.aug.n_lambda();
        for (const RhoKey& k : ps.aug.rho_map)
            ps.rho_labels.push_back("rho:v" + std::to_string(k.j) + "*" +
                                    ps.base_labels[k.p - 1]);
        for (const LambdaKey& k : ps.aug.lambda_map)
            ps.lambda_labels.push_back("lambda:v" + std::to_string(k.j) + "v" +
                                       std::to_string(k.m) + "*" + ps.base_labels[k.p - 1]);
    }
    if (ps.has_aux) {
        ps.n_aux = ps.ship.wind.n_theta;
        ps.aux_labels = ps.ship.wind_labels;
    }
    return ps;
}

/// Regressor matrices and targets for one experiment: at sample k the
/// predictor explains the measured increment y(k) - y(k-1) from signals at
/// k-1, so the series holds N_D - 1 entries.
struct RegressorSeries {
    std::vector<Eigen::MatrixXd> phi;     // rows() x 3 each
    std::vector<Eigen::Vector3d> target;  // y(k) - y(k-1)
};

inline RegressorSeries build_regressors(const Dataset& ds, const PredictorStructure& ps,
                                        int experiment) {
    if (ds.n_d < 2)
        throw std::invalid_argument("build_regressors: need at least two samples");
    if (ps.has_aux && !ds.has_aux)
        throw std::invalid_argument(
            "predictor needs auxiliary measurements but the dataset has none");
    const RegressorSpec& base = ps.merged ? ps.ship.merged : ps.ship.hydro;

    RegressorSeries out;
    out.phi.reserve(ds.n_d - 1);
    out.target.reserve(ds.n_d - 1);
    const int m = ps.rows();
    for (int k = 1; k < ds.n_d; ++k) {
        const Eigen::Vector3d& yp = ds.y[k - 1];
        const Eigen::Vector3d& up = ds.tau[k - 1];
        Eigen::MatrixXd phi = Eigen::MatrixXd::Zero(m, 3);
        int row = 0;
        phi.middleRows(row, ps.n_base) = eval_regressor(base, yp, up);
        row += ps.n_base;
        if (ps.augmented) {
            const Eigen::MatrixXd yr = ds.measured_gain(k - 1);
            for (int r = 0; r < ps.n_rho; ++r)
                for (int f = 0; f < 3; ++f)
                    phi(row + r, f) = eval_polynomial(ps.aug.rho_at(experiment, r, f), yp, up, yr);
            row += ps.n_rho;
            for (int r = 0; r < ps.n_lambda; ++r)
                for (int f = 0; f < 3; ++f)
                    phi(row + r, f) =
                        eval_polynomial(ps.aug.lambda_at(experiment, r, f), yp, up, yr);
            row += ps.n_lambda;
        }
        if (ps.has_aux) {
            phi.middleRows(row, ps.n_aux) =
                eval_regressor(ps.ship.wind, yp + ds.y_aux[k - 1], up);
        }
        out.phi.push_back(std::move(phi));
        out.target.push_back(ds.y[k] - ds.y[k - 1]);
    }
    return out;
}

namespace detail {

/// Piecewise-constant modulation factors for the simulated instrument wind;
/// time variation keeps the wind instrument rows out of the span of the
/// base + nuisance rows.
inline Eigen::Vector2d instrument_wind_at(const EstimOptions& opts, int k, int n_d) {
    static const double grid[8][2] = {{1.0, 1.0}, {1.6, 0.4}, {0.4, 1.6}, {1.6, 1.6},
                                      {0.4, 0.4}, {1.6, 1.0}, {1.0, 1.6}, {1.0, 0.4}};
    const int segments = std::max(1, opts.instrument_segments);
    int seg = static_cast<int>((static_cast<long long>(k) * segments) / std::max(1, n_d));
    seg = std::min(seg, segments - 1) % 8;
    return {opts.instrument_wind_mean(0) * grid[seg][0],
            opts.instrument_wind_mean(1) * grid[seg][1]};
}

}  // namespace detail

/// Noise-free nominal simulation evaluated through the same predictor
/// structure, then centered per row within the experiment so every
/// instrument row has exactly zero sample mean. Depends only on the
/// dataset's input series, never on its measurements.
inline std::vector<Eigen::MatrixXd> build_instruments(const ShipParams& nominal,
                                                      const Dataset& ds,
                                                      const PredictorStructure& ps,
                                                      int experiment,
                                                      const EstimOptions& opts = {}) {
    if (!nominal.to_theta().allFinite())
        throw std::invalid_argument("build_instruments: nominal parameters must be finite");
    const RegressorSpec& base = ps.merged ? ps.ship.merged : ps.ship.hydro;

    // Disturbance-free propagation of the nominal model under the known input.
    std::vector<Eigen::Vector3d> nu_sim(ds.n_d);
    std::vector<double> psi_sim(ds.n_d);
    {
        VesselState st;
        for (int k = 0; k < ds.n_d; ++k) {
            if (!st.nu.allFinite() || !st.eta.allFinite())
                throw std::runtime_error(
                    "instrument simulation diverged to a non-finite state at step " +
                    std::to_string(k));
            nu_sim[k] = st.nu;
            psi_sim[k] = st.eta(2);
            st = ship_step(ps.ship, nominal, st, ds.tau[k], Eigen::Vector3d::Zero(),
                           Eigen::Vector3d::Zero(), Eigen::Vector3d::Zero(), opts.dt);
        }
    }

    const int m = ps.rows();
    const int n = ds.n_d - 1;
    std::vector<Eigen::MatrixXd> z;
    z.reserve(n);
    for (int k = 1; k < ds.n_d; ++k) {
        const Eigen::Vector3d& xp = nu_sim[k - 1];
        const Eigen::Vector3d& up = ds.tau[k - 1];
        const Eigen::Matrix<double, 3, 2> gain = disturbance_gain(psi_sim[k - 1]);
        Eigen::MatrixXd zk = Eigen::MatrixXd::Zero(m, 3);
        int row = 0;
        zk.middleRows(row, ps.n_base) = eval_regressor(base, xp, up);
        row += ps.n_base;
        if (ps.augmented) {
            for (int r = 0; r < ps.n_rho; ++r)
                for (int f = 0; f < 3; ++f)
                    zk(row + r, f) =
                        eval_polynomial(ps.aug.rho_at(experiment, r, f), xp, up, gain);
            row += ps.n_rho;
            for (int r = 0; r < ps.n_lambda; ++r)
                for (int f = 0; f < 3; ++f)
                    zk(row + r, f) =
                        eval_polynomial(ps.aug.lambda_at(experiment, r, f), xp, up, gain);
            row += ps.n_lambda;
        }
        if (ps.has_aux) {
            const Eigen::Vector3d aux_sim =
                -(gain * detail::instrument_wind_at(opts, k - 1, ds.n_d));
            zk.middleRows(row, ps.n_aux) = eval_regressor(ps.ship.wind, xp + aux_sim, up);
        }
        z.push_back(std::move(zk));
    }

    // Per-experiment mean subtraction, entrywise over time.
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(m, 3);
    for (const auto& zk : z) mean += zk;
    mean /= static_cast<double>(n);
    for (auto& zk : z) zk -= mean;
    return z;
}

/// Per-experiment correlation blocks A_i = (1/N) sum Z_i Phi_i^T and
/// b_i = (1/N) sum Z_i d, stacked vertically for the least-squares solve.
struct StackedSystem {
    int m = 0;
    std::vector<Eigen::MatrixXd> a_blocks;
    std::vector<Eigen::VectorXd> b_blocks;

    Eigen::MatrixXd stacked_a() const {
        Eigen::MatrixXd a(static_cast<int>(a_blocks.size()) * m, m);
        for (std::size_t i = 0; i < a_blocks.size(); ++i)
            a.middleRows(static_cast<int>(i) * m, m) = a_blocks[i];
        return a;
    }
    Eigen::VectorXd stacked_b() const {
        Eigen::VectorXd b(static_cast<int>(b_blocks.size()) * m);
        for (std::size_t i = 0; i < b_blocks.size(); ++i)
            b.segment(static_cast<int>(i) * m, m) = b_blocks[i];
        return b;
    }

    void add_block(const std::vector<Eigen::MatrixXd>& z, const RegressorSeries& reg) {
        const int n = static_cast<int>(reg.phi.size());
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
        for (int k = 0; k < n; ++k) {
            a += z[k] * reg.phi[k].transpose();
            b += z[k] * reg.target[k];
        }
        a_blocks.push_back(a / n);
        b_blocks.push_back(b / n);
    }
};

struct SolveInfo {
    Eigen::VectorXd beta;
    Eigen::VectorXd singular_values;
    int numeric_rank = 0;
};

/// Minimum-residual solve of the stacked system via SVD; the numeric rank
/// uses the m * eps * sigma_max threshold. Rank deficiency means the
/// informativity requirement on the instrument-regressor correlation (the
/// full-rank condition) failed, so the solve refuses rather than returning
/// an arbitrary minimizer.
inline SolveInfo solve_iv(const StackedSystem& sys) {
    if (sys.a_blocks.empty()) throw std::invalid_argument("solve_iv: no equation blocks");
    const Eigen::MatrixXd a = sys.stacked_a();
    const Eigen::VectorXd b = sys.stacked_b();
    if (a.rows() < a.cols())
        throw std::invalid_argument("solve_iv: stacked system has fewer rows than unknowns");
    if (!a.allFinite() || !b.allFinite())
        throw std::runtime_error("solve_iv: stacked system contains non-finite entries");

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SolveInfo info;
    info.singular_values = svd.singularValues();
    const double sigma_max = info.singular_values.size() ? info.singular_values(0) : 0.0;
    const double threshold =
        static_cast<double>(a.cols()) * std::numeric_limits<double>::epsilon() * sigma_max;
    info.numeric_rank = 0;
    for (int i = 0; i < info.singular_values.size(); ++i)
        if (info.singular_values(i) > threshold) ++info.numeric_rank;
    if (info.numeric_rank < a.cols()) {
        std::ostringstream os;
        os << "instrument-regressor correlation matrix is rank deficient (rank "
           << info.numeric_rank << " of " << a.cols()
           << "); the stacked correlation must have full rank for the IV solution to be "
              "unique";
        throw RankDeficiencyError(os.str());
    }
    info.beta = svd.solve(b);
    return info;
}

struct EstimationResult {
    PredictorKind kind = PredictorKind::Basic;
    bool merged = true;

    Eigen::VectorXd beta;
    Eigen::VectorXd theta_model;  // base block estimate (14 merged or 14 hydro)
    Eigen::VectorXd rho, lambda, theta2;
    std::vector<std::string> base_labels, rho_labels, lambda_labels, aux_labels;

    ShipParams fitted;  // simulable parameter set

    Eigen::VectorXd singular_values;
    int numeric_rank = 0;
    int iterations = 0;
    bool converged = false;
    double max_instrument_row_mean = 0.0;
    std::vector<SignPattern> sign_patterns;
    int n_e = 0;
    int n_d = 0;

    /// Effective parameter vector the estimator is accountable for: the 14
    /// identifiable combinations for merged kinds, all 17 otherwise.
    Eigen::VectorXd effective_estimate() const {
        if (merged) return theta_model;
        Eigen::VectorXd full(theta_model.size() + theta2.size());
        full << theta_model, theta2;
        return full;
    }

    Eigen::VectorXd effective_truth(const ShipStructure& ship, const ShipParams& truth) const {
        if (merged) return ship.merged_theta(truth);
        Eigen::VectorXd full(theta_model.size() + theta2.size());
        full << ship.hydro_theta(truth), ship.wind_theta(truth);
        return full;
    }

    double relative_parameter_error(const ShipParams& truth) const {
        const ShipStructure ship = ship_regressor_spec();
        const Eigen::VectorXd t = effective_truth(ship, truth);
        return (effective_estimate() - t).norm() / t.norm();
    }
};

namespace detail {

inline double max_abs_row_mean(const std::vector<Eigen::MatrixXd>& z) {
    if (z.empty()) return 0.0;
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(z[0].rows(), z[0].cols());
    for (const auto& zk : z) mean += zk;
    mean /= static_cast<double>(z.size());
    return mean.cwiseAbs().maxCoeff();
}

inline void unpack_beta(const PredictorStructure& ps, const Eigen::VectorXd& beta,
                        EstimationResult& out) {
    int off = 0;
    out.theta_model = beta.segment(off, ps.n_base);
    off += ps.n_base;
    out.rho = beta.segment(off, ps.n_rho);
    off += ps.n_rho;
    out.lambda = beta.segment(off, ps.n_lambda);
    off += ps.n_lambda;
    out.theta2 = beta.segment(off, ps.n_aux);
    if (ps.merged)
        out.fitted = ps.ship.params_from_merged(out.theta_model);
    else
        out.fitted = ps.ship.params_from_blocks(out.theta_model, out.theta2);
}

}  // namespace detail

/// Runs one estimator over a group of experiments. IV kinds iterate the
/// instrument refinement from the nominal model; non-convergence returns the
/// best iterate with the flag cleared. The least-squares kind solves the
/// pooled normal equations in one shot.
inline EstimationResult estimate(std::span<const Dataset> datasets, PredictorKind kind,
                                 const ShipParams& nominal, const EstimOptions& opts = {}) {
    if (datasets.empty()) throw std::invalid_argument("estimate: need at least one dataset");
    for (const auto& ds : datasets)
        if (ds.n_d < 2) throw std::invalid_argument("estimate: datasets need >= 2 samples");

    const std::vector<SignPattern> signs = infer_sign_patterns(datasets);
    const PredictorStructure ps = build_predictor_structure(kind, signs);
    const int n_e = static_cast<int>(datasets.size());

    std::vector<RegressorSeries> regs;
    regs.reserve(n_e);
    for (int e = 0; e < n_e; ++e) regs.push_back(build_regressors(datasets[e], ps, e));

    EstimationResult out;
    out.kind = kind;
    out.merged = ps.merged;
    out.base_labels = ps.base_labels;
    out.rho_labels = ps.rho_labels;
    out.lambda_labels = ps.lambda_labels;
    out.aux_labels = ps.aux_labels;
    out.sign_patterns = signs;
    out.n_e = n_e;
    out.n_d = datasets[0].n_d;

    if (kind == PredictorKind::LeastSquaresAux) {
        // Pooled normal equations over all experiments; Z := regressors.
        StackedSystem sys;
        sys.m = ps.rows();
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(sys.m, sys.m);
        Eigen::VectorXd b = Eigen::VectorXd::Zero(sys.m);
        long long total = 0;
        for (const auto& reg : regs) {
            for (std::size_t k = 0; k < reg.phi.size(); ++k) {
                a += reg.phi[k] * reg.phi[k].transpose();
                b += reg.phi[k] * reg.target[k];
            }
            total += static_cast<long long>(reg.phi.size());
        }
        sys.a_blocks.push_back(a / static_cast<double>(total));
        sys.b_blocks.push_back(b / static_cast<double>(total));
        const SolveInfo info = solve_iv(sys);
        out.beta = info.beta;
        out.singular_values = info.singular_values;
        out.numeric_rank = info.numeric_rank;
        out.iterations = 1;
        out.converged = true;
        detail::unpack_beta(ps, out.beta, out);
        return out;
    }

    ShipParams current = nominal;
    std::optional<EstimationResult> best;
    for (int it = 1; it <= opts.max_iter; ++it) {
        StackedSystem sys;
        sys.m = ps.rows();
        double worst_mean = 0.0;
        try {
            for (int e = 0; e < n_e; ++e) {
                const auto z = build_instruments(current, datasets[e], ps, e, opts);
                worst_mean = std::max(worst_mean, detail::max_abs_row_mean(z));
                sys.add_block(z, regs[e]);
            }
        } catch (const std::runtime_error&) {
            if (!best) throw;  // nominal model itself cannot simulate this input
            best->converged = false;
            return *best;
        }

        SolveInfo info;
        try {
            info = solve_iv(sys);
        } catch (const RankDeficiencyError&) {
            if (!best) throw;
            best->converged = false;
            return *best;
        }

        out.beta = info.beta;
        out.singular_values = info.singular_values;
        out.numeric_rank = info.numeric_rank;
        out.iterations = it;
        out.max_instrument_row_mean = std::max(out.max_instrument_row_mean, worst_mean);
        detail::unpack_beta(ps, out.beta, out);

        const Eigen::VectorXd prev = current.to_theta();
        const Eigen::VectorXd next = out.fitted.to_theta();
        const double denom = std::max(prev.norm(), 1e-12);
        const double delta = (next - prev).norm() / denom;
        current = out.fitted;
        best = out;
        if (delta < opts.tol) {
            best->converged = true;
            return *best;
        }
    }
    best->converged = false;
    return *best;
}

/// Free-run simulation of a fitted model against undisturbed validation
/// data; returns the normalized fit per channel (100 = perfect, negative
/// possible). Throws on non-finite propagation (caller decides how to score
/// a diverged model) and on a constant validation channel.
inline Eigen::Vector3d model_fit(const Dataset& validation, const ShipParams& fitted,
                                 double dt = 1.0) {
    if (validation.n_d < 2) throw std::invalid_argument("model_fit: validation set too short");
    static const ShipStructure structure = ship_regressor_spec();

    std::vector<Eigen::Vector3d> sim(validation.n_d);
    Eigen::Vector3d nu = validation.y[0];
    for (int k = 0; k < validation.n_d; ++k) {
        if (!nu.allFinite())
            throw std::runtime_error("fitted model diverged during free-run at step " +
                                     std::to_string(k));
        sim[k] = nu;
        nu = nu + dt * ship_increment(structure, fitted, nu, nu, validation.tau[k]);
    }

    Eigen::Vector3d fit;
    for (int c = 0; c < 3; ++c) {
        double mean = 0.0;
        for (int k = 0; k < validation.n_d; ++k) mean += validation.y[k](c);
        mean /= validation.n_d;
        double num = 0.0, den = 0.0;
        for (int k = 0; k < validation.n_d; ++k) {
            num += std::pow(validation.y[k](c) - sim[k](c), 2);
            den += std::pow(validation.y[k](c) - mean, 2);
        }
        if (den == 0.0)
            throw std::invalid_argument("model_fit: validation channel " + std::to_string(c + 1) +
                                        " is constant (zero deviation norm)");
        fit(c) = 100.0 * (1.0 - std::sqrt(num) / std::sqrt(den));
    }
    return fit;
}

/// Human-readable estimation report: parameter table with optional truth
/// column, nuisance estimates, singular values and diagnostics.
inline std::string format_report(const EstimationResult& r, const ShipParams* truth = nullptr) {
    std::ostringstream os;
    os << "estimator: " << predictor_kind_name(r.kind) << "\n";
    os << "experiments: " << r.n_e << "  samples/experiment: " << r.n_d << "\n";
    os << "iterations: " << r.iterations << (r.converged ? " (converged)" : " (NOT converged)")
       << "\n";
    os << "numeric rank: " << r.numeric_rank << " of " << r.beta.size() << "\n";
    os << "max instrument row mean: " << r.max_instrument_row_mean << "\n\n";

    const ShipStructure ship = ship_regressor_spec();
    os << "parameter            estimate";
    if (truth) os << "        truth      rel.error";
    os << "\n";
    auto print_row = [&](const std::string& name, double est, const double* tv) {
        char buf[160];
        if (tv) {
            const double rel = *tv != 0.0 ? std::abs(est - *tv) / std::abs(*tv) : std::abs(est);
            std::snprintf(buf, sizeof(buf), "%-18s %12.6g %12.6g %12.3g\n", name.c_str(), est,
                          *tv, rel);
        } else {
            std::snprintf(buf, sizeof(buf), "%-18s %12.6g\n", name.c_str(), est);
        }
        os << buf;
    };
    std::optional<Eigen::VectorXd> truth_eff;
    if (truth) truth_eff = r.effective_truth(ship, *truth);
    const Eigen::VectorXd est_eff = r.effective_estimate();
    std::vector<std::string> eff_labels = r.base_labels;
    eff_labels.insert(eff_labels.end(), r.aux_labels.begin(), r.aux_labels.end());
    for (int i = 0; i < est_eff.size(); ++i) {
        const double* tv = truth_eff ? &(*truth_eff)(i) : nullptr;
        print_row(eff_labels[i], est_eff(i), tv);
    }
    if (r.rho.size()) {
        os << "\nnuisance (rho):\n";
        for (int i = 0; i < r.rho.size(); ++i) print_row(r.rho_labels[i], r.rho(i), nullptr);
    }
    if (r.lambda.size()) {
        os << "\nnuisance (lambda):\n";
        for (int i = 0; i < r.lambda.size(); ++i)
            print_row(r.lambda_labels[i], r.lambda(i), nullptr);
    }
    os << "\nsingular values:";
    for (int i = 0; i < r.singular_values.size(); ++i) {
        if (i % 6 == 0) os << "\n ";
        char buf[32];
        std::snprintf(buf, sizeof(buf), " %10.4g", r.singular_values(i));
        os << buf;
    }
    os << "\n";
    return os.str();
}

}  // namespace somid
