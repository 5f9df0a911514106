#pragma once

// Exact-coefficient monomial algebra backing the regressor expansion.
// Atoms name signals (states, inputs, rotation entries, disturbances,
// nuisance products); terms carry integer coefficients so that structural
// zeros stay exact until evaluation.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace somid {

struct Atom {
    enum class Kind : std::uint8_t {
        State,           // x_i              (a = i)
        Input,           // u_i              (a = i)
        REntry,          // R_{i,j}          (a = i, b = j)
        Dist,            // v_j              (a = j)
        NuisanceRho,     // v_j * theta_p    (a = j, b = p)
        NuisanceLambda,  // v_j v_m theta_p  (a = j, b = m, c = p)
    };

    Kind kind;
    int a = 0, b = 0, c = 0;  // 1-based indices, meaning depends on kind

    static Atom state(int i) { return {Kind::State, i, 0, 0}; }
    static Atom input(int i) { return {Kind::Input, i, 0, 0}; }
    static Atom r_entry(int i, int j) { return {Kind::REntry, i, j, 0}; }
    static Atom dist(int j) { return {Kind::Dist, j, 0, 0}; }
    static Atom nuisance_rho(int j, int p) { return {Kind::NuisanceRho, j, p, 0}; }
    static Atom nuisance_lambda(int j, int m, int p) {
        if (j > m) std::swap(j, m);
        return {Kind::NuisanceLambda, j, m, p};
    }

    friend bool operator==(const Atom& x, const Atom& y) {
        return x.kind == y.kind && x.a == y.a && x.b == y.b && x.c == y.c;
    }
    friend bool operator<(const Atom& x, const Atom& y) {
        return std::tie(x.kind, x.a, x.b, x.c) < std::tie(y.kind, y.a, y.b, y.c);
    }

    std::string label() const {
        std::ostringstream os;
        switch (kind) {
            case Kind::State: os << "x" << a; break;
            case Kind::Input: os << "u" << a; break;
            case Kind::REntry: os << "R(" << a << "," << b << ")"; break;
            case Kind::Dist: os << "v" << a; break;
            case Kind::NuisanceRho: os << "rho(" << a << ";" << b << ")"; break;
            case Kind::NuisanceLambda: os << "lambda(" << a << "," << b << ";" << c << ")"; break;
        }
        return os.str();
    }
};

/// One product term: integer coefficient times a sorted multiset of atoms.
struct PolyTerm {
    std::int64_t coeff = 0;
    std::vector<Atom> factors;  // kept sorted

    PolyTerm() = default;
    PolyTerm(std::int64_t c, std::vector<Atom> f) : coeff(c), factors(std::move(f)) {
        std::sort(factors.begin(), factors.end());
    }

    friend bool operator==(const PolyTerm& x, const PolyTerm& y) {
        return x.coeff == y.coeff && x.factors == y.factors;
    }

    std::string label() const {
        std::ostringstream os;
        os << coeff;
        for (const auto& f : factors) os << "*" << f.label();
        return os.str();
    }
};

/// Canonical sum of terms: factors sorted within terms, terms sorted
/// lexicographically by factor list, equal factor lists merged, zero
/// coefficients dropped. Canonical form makes structural equality a
/// plain vector comparison.
class Polynomial {
  public:
    Polynomial() = default;
    explicit Polynomial(std::vector<PolyTerm> terms) : terms_(std::move(terms)) { canonicalize(); }

    static Polynomial zero() { return Polynomial{}; }
    static Polynomial constant(std::int64_t c) {
        return c == 0 ? Polynomial{} : Polynomial{{PolyTerm{c, {}}}};
    }
    static Polynomial atom(Atom a) { return Polynomial{{PolyTerm{1, {a}}}}; }

    const std::vector<PolyTerm>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    Polynomial& operator+=(const Polynomial& other) {
        terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
        canonicalize();
        return *this;
    }
    friend Polynomial operator+(Polynomial x, const Polynomial& y) { return x += y; }

    Polynomial operator*(const Polynomial& other) const {
        std::vector<PolyTerm> prod;
        prod.reserve(terms_.size() * other.terms_.size());
        for (const auto& s : terms_)
            for (const auto& t : other.terms_) {
                std::vector<Atom> f = s.factors;
                f.insert(f.end(), t.factors.begin(), t.factors.end());
                prod.emplace_back(s.coeff * t.coeff, std::move(f));
            }
        return Polynomial{std::move(prod)};
    }

    Polynomial scaled(std::int64_t c) const {
        if (c == 0) return {};
        Polynomial out = *this;
        for (auto& t : out.terms_) t.coeff *= c;
        return out;
    }

    friend bool operator==(const Polynomial& x, const Polynomial& y) {
        return x.terms_ == y.terms_;
    }

    /// Evaluates against a caller-supplied atom valuation.
    double eval(const std::function<double(const Atom&)>& value_of) const {
        double sum = 0.0;
        for (const auto& t : terms_) {
            double prod = static_cast<double>(t.coeff);
            for (const auto& f : t.factors) prod *= value_of(f);
            sum += prod;
        }
        return sum;
    }

    std::string label() const {
        if (terms_.empty()) return "0";
        std::string s;
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            if (i) s += " + ";
            s += terms_[i].label();
        }
        return s;
    }

  private:
    void canonicalize() {
        for (auto& t : terms_) std::sort(t.factors.begin(), t.factors.end());
        std::sort(terms_.begin(), terms_.end(),
                  [](const PolyTerm& x, const PolyTerm& y) { return x.factors < y.factors; });
        std::vector<PolyTerm> merged;
        for (auto& t : terms_) {
            if (!merged.empty() && merged.back().factors == t.factors)
                merged.back().coeff += t.coeff;
            else
                merged.push_back(std::move(t));
        }
        merged.erase(std::remove_if(merged.begin(), merged.end(),
                                    [](const PolyTerm& t) { return t.coeff == 0; }),
                     merged.end());
        terms_ = std::move(merged);
    }

    std::vector<PolyTerm> terms_;
};

}  // namespace somid
