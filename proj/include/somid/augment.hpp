#pragma once

// Sign-resolved polynomial expansion of modulus regressors and the derived
// nuisance (rho, lambda) regressor structure: substituting x_i -> x_i +
// sum_j R_{i,j} v_j into the sign-expanded entries and collecting terms by
// v-degree yields the base block plus one rho row per (j,p) interaction and
// one lambda row per (j<=m, p).

#include "polynomial.hpp"
#include "regressor.hpp"

#include <Eigen/Dense>

#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace somid {

/// Modulus-free polynomial for one term: every |z_j| replaced by s_j * z_j.
/// Valid wherever sign(z_j) = s_j for all modulus arguments.
inline Polynomial expand_term_under_signs(const TermKind& t, const SignPattern& signs, int n_x) {
    auto var = [&](int i) {
        return Polynomial::atom(i <= n_x ? Atom::state(i) : Atom::input(i - n_x));
    };
    switch (t.tag) {
        case TermKind::Tag::Zero: return Polynomial::zero();
        case TermKind::Tag::Linear: return var(t.i);
        case TermKind::Tag::Abs: return var(t.i).scaled(signs.sign_for(t.i, n_x));
        case TermKind::Tag::Cross: return var(t.i) * var(t.j);
        case TermKind::Tag::CrossAbs:
            return (var(t.i) * var(t.j)).scaled(signs.sign_for(t.j, n_x));
    }
    return Polynomial::zero();
}

/// Per-entry sign-expanded polynomials, row-major n_theta x n_f.
inline std::vector<Polynomial> expand_under_signs(const RegressorSpec& spec,
                                                  const SignPattern& signs) {
    spec.validate();
    std::vector<Polynomial> grid;
    grid.reserve(spec.entries.size());
    for (const auto& t : spec.entries) grid.push_back(expand_term_under_signs(t, signs, spec.n_x));
    return grid;
}

struct RhoKey {
    int j = 0;  // disturbance component, 1-based
    int p = 0;  // parameter row, 1-based
    friend bool operator==(const RhoKey& a, const RhoKey& b) { return a.j == b.j && a.p == b.p; }
    friend bool operator<(const RhoKey& a, const RhoKey& b) {
        return std::tie(a.p, a.j) < std::tie(b.p, b.j);  // p-major ordering
    }
};

struct LambdaKey {
    int j = 0, m = 0;  // disturbance pair, j <= m
    int p = 0;
    friend bool operator==(const LambdaKey& a, const LambdaKey& b) {
        return a.j == b.j && a.m == b.m && a.p == b.p;
    }
    friend bool operator<(const LambdaKey& a, const LambdaKey& b) {
        return std::tie(a.p, a.j, a.m) < std::tie(b.p, b.j, b.m);
    }
};

/// Base spec plus the per-experiment rho/lambda regressor rows and the shared
/// nuisance index maps. Row r of the rho block (an n_rho x n_f matrix of
/// polynomials over states, inputs and R entries) pairs with the nuisance
/// unknown v_j * theta_p named by rho_map[r]; likewise lambda rows with
/// v_j v_m * theta_p. Rows structurally zero in every experiment are pruned.
struct AugmentedStructure {
    RegressorSpec base;
    int n_v = 0;
    std::vector<RhoKey> rho_map;
    std::vector<LambdaKey> lambda_map;
    // rows[e][r * n_f + f]
    std::vector<std::vector<Polynomial>> rho_rows;
    std::vector<std::vector<Polynomial>> lambda_rows;

    int n_rho() const { return static_cast<int>(rho_map.size()); }
    int n_lambda() const { return static_cast<int>(lambda_map.size()); }
    int n_experiments() const { return static_cast<int>(rho_rows.size()); }

    const Polynomial& rho_at(int e, int r, int f) const {
        return rho_rows[e][static_cast<std::size_t>(r) * base.n_f + f];
    }
    const Polynomial& lambda_at(int e, int r, int f) const {
        return lambda_rows[e][static_cast<std::size_t>(r) * base.n_f + f];
    }
};

namespace detail {

struct VSplit {
    Polynomial deg0;
    std::map<int, Polynomial> deg1;                  // j -> coefficient polynomial
    std::map<std::pair<int, int>, Polynomial> deg2;  // (j<=m) -> coefficient polynomial
};

// Substitutes x_i -> x_i + sum_j R_{i,j} v_j (skipping masked R entries) and
// splits the expansion by degree in the Dist atoms.
inline VSplit substitute_and_split(const Polynomial& poly, int n_v,
                                   const std::set<std::pair<int, int>>& r_zeros) {
    Polynomial substituted;
    for (const PolyTerm& term : poly.terms()) {
        Polynomial prod = Polynomial::constant(term.coeff);
        for (const Atom& f : term.factors) {
            if (f.kind == Atom::Kind::State) {
                Polynomial offset = Polynomial::atom(f);
                for (int j = 1; j <= n_v; ++j) {
                    if (r_zeros.count({f.a, j})) continue;
                    offset += Polynomial::atom(Atom::r_entry(f.a, j)) *
                              Polynomial::atom(Atom::dist(j));
                }
                prod = prod * offset;
            } else {
                prod = prod * Polynomial::atom(f);
            }
        }
        substituted += prod;
    }

    VSplit split;
    std::vector<PolyTerm> deg0;
    std::map<int, std::vector<PolyTerm>> deg1;
    std::map<std::pair<int, int>, std::vector<PolyTerm>> deg2;
    for (const PolyTerm& term : substituted.terms()) {
        std::vector<int> vs;
        std::vector<Atom> rest;
        for (const Atom& f : term.factors) {
            if (f.kind == Atom::Kind::Dist)
                vs.push_back(f.a);
            else
                rest.push_back(f);
        }
        PolyTerm stripped{term.coeff, std::move(rest)};
        if (vs.empty()) {
            deg0.push_back(std::move(stripped));
        } else if (vs.size() == 1) {
            deg1[vs[0]].push_back(std::move(stripped));
        } else if (vs.size() == 2) {
            deg2[{std::min(vs[0], vs[1]), std::max(vs[0], vs[1])}].push_back(std::move(stripped));
        } else {
            throw std::logic_error("expansion produced a term of degree > 2 in v");
        }
    }
    split.deg0 = Polynomial{std::move(deg0)};
    for (auto& [j, ts] : deg1) split.deg1[j] = Polynomial{std::move(ts)};
    for (auto& [jm, ts] : deg2) split.deg2[jm] = Polynomial{std::move(ts)};
    return split;
}

}  // namespace detail

/// Derives the augmented structure for one or more experiments sharing the
/// same base spec. `r_structural_zeros` lists (i,j) entries of R known to be
/// identically zero (1-based); interactions through them are dropped exactly.
inline AugmentedStructure derive_augmented(
    const RegressorSpec& spec, std::span<const SignPattern> signs, int n_v,
    const std::vector<std::pair<int, int>>& r_structural_zeros = {}) {
    if (n_v <= 0) throw std::invalid_argument("disturbance dimension n_v must be positive");
    if (signs.empty()) throw std::invalid_argument("at least one sign pattern is required");
    spec.validate();
    const std::set<std::pair<int, int>> r_zeros(r_structural_zeros.begin(),
                                                r_structural_zeros.end());

    const int n_e = static_cast<int>(signs.size());
    // splits[e][p * n_f + f]
    std::vector<std::vector<detail::VSplit>> splits(n_e);
    std::set<RhoKey> rho_keys;
    std::set<LambdaKey> lambda_keys;
    for (int e = 0; e < n_e; ++e) {
        const auto grid = expand_under_signs(spec, signs[e]);
        splits[e].reserve(grid.size());
        for (int p = 0; p < spec.n_theta; ++p) {
            for (int f = 0; f < spec.n_f; ++f) {
                auto split = detail::substitute_and_split(
                    grid[static_cast<std::size_t>(p) * spec.n_f + f], n_v, r_zeros);
                for (const auto& [j, poly] : split.deg1)
                    if (!poly.is_zero()) rho_keys.insert({j, p + 1});
                for (const auto& [jm, poly] : split.deg2)
                    if (!poly.is_zero()) lambda_keys.insert({jm.first, jm.second, p + 1});
                splits[e].push_back(std::move(split));
            }
        }
    }

    AugmentedStructure out;
    out.base = spec;
    out.n_v = n_v;
    out.rho_map.assign(rho_keys.begin(), rho_keys.end());
    out.lambda_map.assign(lambda_keys.begin(), lambda_keys.end());

    const std::size_t cells_rho = out.rho_map.size() * spec.n_f;
    const std::size_t cells_lambda = out.lambda_map.size() * spec.n_f;
    out.rho_rows.assign(n_e, std::vector<Polynomial>(cells_rho));
    out.lambda_rows.assign(n_e, std::vector<Polynomial>(cells_lambda));
    for (int e = 0; e < n_e; ++e) {
        for (std::size_t r = 0; r < out.rho_map.size(); ++r) {
            const RhoKey key = out.rho_map[r];
            for (int f = 0; f < spec.n_f; ++f) {
                const auto& split =
                    splits[e][static_cast<std::size_t>(key.p - 1) * spec.n_f + f];
                auto it = split.deg1.find(key.j);
                if (it != split.deg1.end())
                    out.rho_rows[e][r * spec.n_f + f] = it->second;
            }
        }
        for (std::size_t r = 0; r < out.lambda_map.size(); ++r) {
            const LambdaKey key = out.lambda_map[r];
            for (int f = 0; f < spec.n_f; ++f) {
                const auto& split =
                    splits[e][static_cast<std::size_t>(key.p - 1) * spec.n_f + f];
                auto it = split.deg2.find({key.j, key.m});
                if (it != split.deg2.end())
                    out.lambda_rows[e][r * spec.n_f + f] = it->second;
            }
        }
    }
    return out;
}

inline AugmentedStructure derive_augmented(
    const RegressorSpec& spec, const SignPattern& signs, int n_v,
    const std::vector<std::pair<int, int>>& r_structural_zeros = {}) {
    return derive_augmented(spec, std::span<const SignPattern>(&signs, 1), n_v,
                            r_structural_zeros);
}

/// Valuation of a rho/lambda polynomial at concrete signals.
inline double eval_polynomial(const Polynomial& poly, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& u, const Eigen::MatrixXd& r) {
    return poly.eval([&](const Atom& a) -> double {
        switch (a.kind) {
            case Atom::Kind::State: return x(a.a - 1);
            case Atom::Kind::Input: return u(a.a - 1);
            case Atom::Kind::REntry: return r(a.a - 1, a.b - 1);
            default:
                throw std::invalid_argument("polynomial contains non-signal atom " + a.label());
        }
    });
}

/// Stacked (n_theta + n_rho + n_lambda) x n_f regressor matrix for experiment
/// e: literal base block on top, then the rho and lambda blocks evaluated at
/// (x, u, R).
inline Eigen::MatrixXd eval_augmented_regressor(const AugmentedStructure& aug, int e,
                                                const Eigen::VectorXd& x,
                                                const Eigen::VectorXd& u,
                                                const Eigen::MatrixXd& r) {
    if (e < 0 || e >= aug.n_experiments())
        throw std::invalid_argument("experiment index out of range");
    if (r.rows() != aug.base.n_x || r.cols() != aug.n_v)
        throw std::invalid_argument("R matrix must be n_x x n_v");
    const int n_f = aug.base.n_f;
    Eigen::MatrixXd out(aug.base.n_theta + aug.n_rho() + aug.n_lambda(), n_f);
    out.topRows(aug.base.n_theta) = eval_regressor(aug.base, x, u);
    for (int rr = 0; rr < aug.n_rho(); ++rr)
        for (int f = 0; f < n_f; ++f)
            out(aug.base.n_theta + rr, f) = eval_polynomial(aug.rho_at(e, rr, f), x, u, r);
    for (int rr = 0; rr < aug.n_lambda(); ++rr)
        for (int f = 0; f < n_f; ++f)
            out(aug.base.n_theta + aug.n_rho() + rr, f) =
                eval_polynomial(aug.lambda_at(e, rr, f), x, u, r);
    return out;
}

/// True nuisance vector [.. v_j theta_p ..; .. v_j v_m theta_p ..] for given
/// disturbance value and parameters; used by tests and moment checks.
inline Eigen::VectorXd true_nuisance_vector(const AugmentedStructure& aug,
                                            const Eigen::VectorXd& theta,
                                            const Eigen::VectorXd& v) {
    if (v.size() != aug.n_v) throw std::invalid_argument("disturbance vector length mismatch");
    Eigen::VectorXd out(aug.n_rho() + aug.n_lambda());
    for (int r = 0; r < aug.n_rho(); ++r) {
        const RhoKey k = aug.rho_map[r];
        out(r) = v(k.j - 1) * theta(k.p - 1);
    }
    for (int r = 0; r < aug.n_lambda(); ++r) {
        const LambdaKey k = aug.lambda_map[r];
        out(aug.n_rho() + r) = v(k.j - 1) * v(k.m - 1) * theta(k.p - 1);
    }
    return out;
}

}  // namespace somid
