#pragma once

// Second-order modulus regressor matrices: term grammar, dense spec grid,
// literal evaluation and the text serialization used by config files.

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace somid {

/// One entry of a regressor matrix. Indices are 1-based positions into the
/// stacked vector [x; u]: i <= n_x addresses a state, i > n_x an input.
/// CrossAbs(i,j) means z_i * |z_j| (order significant); Cross is stored
/// with i <= j.
struct TermKind {
    enum class Tag : std::uint8_t { Zero, Linear, Abs, Cross, CrossAbs };

    Tag tag = Tag::Zero;
    int i = 0, j = 0;

    static TermKind zero() { return {}; }
    static TermKind linear(int i) { return {Tag::Linear, i, 0}; }
    static TermKind abs(int i) { return {Tag::Abs, i, 0}; }
    static TermKind cross(int i, int j) {
        if (i > j) std::swap(i, j);
        return {Tag::Cross, i, j};
    }
    static TermKind cross_abs(int i, int j) { return {Tag::CrossAbs, i, j}; }

    friend bool operator==(const TermKind& a, const TermKind& b) {
        return std::tie(a.tag, a.i, a.j) == std::tie(b.tag, b.i, b.j);
    }

    std::string format() const {
        std::ostringstream os;
        switch (tag) {
            case Tag::Zero: os << "zero"; break;
            case Tag::Linear: os << "lin:" << i; break;
            case Tag::Abs: os << "abs:" << i; break;
            case Tag::Cross: os << "cross:" << i << "," << j; break;
            case Tag::CrossAbs: os << "crossabs:" << i << "," << j; break;
        }
        return os.str();
    }

    static TermKind parse(const std::string& text) {
        auto fail = [&] {
            throw std::invalid_argument("unrecognized regressor term tag '" + text + "'");
        };
        if (text == "zero") return zero();
        auto colon = text.find(':');
        if (colon == std::string::npos) fail();
        const std::string head = text.substr(0, colon);
        const std::string args = text.substr(colon + 1);
        auto parse_int = [&](const std::string& s) {
            std::size_t pos = 0;
            int v = 0;
            try {
                v = std::stoi(s, &pos);
            } catch (const std::exception&) {
                fail();
            }
            if (pos != s.size()) fail();
            return v;
        };
        if (head == "lin") return linear(parse_int(args));
        if (head == "abs") return abs(parse_int(args));
        auto comma = args.find(',');
        if (comma == std::string::npos) fail();
        const int a = parse_int(args.substr(0, comma));
        const int b = parse_int(args.substr(comma + 1));
        if (head == "cross") return cross(a, b);
        if (head == "crossabs") return cross_abs(a, b);
        fail();
        return zero();  // unreachable
    }
};

/// Dense n_theta x n_f grid of terms plus the dimension metadata needed to
/// interpret stacked indices.
struct RegressorSpec {
    int n_theta = 0;
    int n_f = 0;
    int n_x = 0;
    int n_u = 0;
    std::vector<TermKind> entries;  // row-major, n_theta * n_f

    TermKind& at(int p, int f) { return entries[static_cast<std::size_t>(p) * n_f + f]; }
    const TermKind& at(int p, int f) const {
        return entries[static_cast<std::size_t>(p) * n_f + f];
    }

    static RegressorSpec zeros(int n_theta, int n_f, int n_x, int n_u) {
        RegressorSpec s;
        s.n_theta = n_theta;
        s.n_f = n_f;
        s.n_x = n_x;
        s.n_u = n_u;
        s.entries.assign(static_cast<std::size_t>(n_theta) * n_f, TermKind::zero());
        return s;
    }

    void validate() const {
        if (n_theta <= 0 || n_f <= 0 || n_x < 0 || n_u < 0)
            throw std::invalid_argument("regressor spec has non-positive dimensions");
        if (entries.size() != static_cast<std::size_t>(n_theta) * n_f)
            throw std::invalid_argument("regressor spec entry grid size mismatch");
        const int n_z = n_x + n_u;
        auto check_index = [&](int idx) {
            if (idx < 1 || idx > n_z)
                throw std::invalid_argument("regressor term index " + std::to_string(idx) +
                                            " outside stacked dimension " + std::to_string(n_z));
        };
        for (const auto& t : entries) {
            switch (t.tag) {
                case TermKind::Tag::Zero: break;
                case TermKind::Tag::Linear:
                case TermKind::Tag::Abs: check_index(t.i); break;
                case TermKind::Tag::Cross:
                case TermKind::Tag::CrossAbs:
                    check_index(t.i);
                    check_index(t.j);
                    break;
            }
        }
    }

    /// Text form: header line "som <n_theta> <n_f> <n_x> <n_u>", then one
    /// line per parameter row with n_f whitespace-separated term tags.
    std::string to_text() const {
        std::ostringstream os;
        os << "som " << n_theta << " " << n_f << " " << n_x << " " << n_u << "\n";
        for (int p = 0; p < n_theta; ++p) {
            for (int f = 0; f < n_f; ++f) {
                if (f) os << " ";
                os << at(p, f).format();
            }
            os << "\n";
        }
        return os.str();
    }

    static RegressorSpec from_text(const std::string& text) {
        std::istringstream is(text);
        std::string magic;
        RegressorSpec s;
        if (!(is >> magic >> s.n_theta >> s.n_f >> s.n_x >> s.n_u) || magic != "som")
            throw std::invalid_argument("regressor spec text must start with 'som nt nf nx nu'");
        if (s.n_theta <= 0 || s.n_f <= 0)
            throw std::invalid_argument("regressor spec text has non-positive dimensions");
        s.entries.reserve(static_cast<std::size_t>(s.n_theta) * s.n_f);
        std::string tag;
        for (int k = 0; k < s.n_theta * s.n_f; ++k) {
            if (!(is >> tag))
                throw std::invalid_argument("regressor spec text ended early at entry " +
                                            std::to_string(k));
            s.entries.push_back(TermKind::parse(tag));
        }
        s.validate();
        return s;
    }

    friend bool operator==(const RegressorSpec& a, const RegressorSpec& b) {
        return a.n_theta == b.n_theta && a.n_f == b.n_f && a.n_x == b.n_x && a.n_u == b.n_u &&
               a.entries == b.entries;
    }
};

/// Fixed signs for the modulus arguments of one experiment: one per state,
/// plus signs for any inputs that appear inside |.| terms.
struct SignPattern {
    std::vector<int> state_signs;       // size n_x, entries +1 / -1
    std::map<int, int> input_signs;     // 1-based input index -> +1 / -1

    static SignPattern all_positive(int n_x) {
        SignPattern s;
        s.state_signs.assign(n_x, +1);
        return s;
    }

    /// Sign of stacked index i (1-based). Throws if no sign is known.
    int sign_for(int i, int n_x) const {
        if (i <= n_x) {
            if (i < 1 || i > static_cast<int>(state_signs.size()))
                throw std::invalid_argument("sign pattern missing state " + std::to_string(i));
            const int s = state_signs[i - 1];
            if (s != 1 && s != -1)
                throw std::invalid_argument("sign pattern state " + std::to_string(i) +
                                            " is not +1/-1");
            return s;
        }
        auto it = input_signs.find(i - n_x);
        if (it == input_signs.end())
            throw std::invalid_argument("sign pattern missing input " + std::to_string(i - n_x) +
                                        " used inside a modulus term");
        if (it->second != 1 && it->second != -1)
            throw std::invalid_argument("sign pattern input " + std::to_string(i - n_x) +
                                        " is not +1/-1");
        return it->second;
    }

    friend bool operator==(const SignPattern& a, const SignPattern& b) {
        return a.state_signs == b.state_signs && a.input_signs == b.input_signs;
    }
};

namespace detail {

inline double stacked_value(int i, const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    const int n_x = static_cast<int>(x.size());
    return i <= n_x ? x(i - 1) : u(i - 1 - n_x);
}

inline void check_dims(const RegressorSpec& spec, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& u) {
    if (x.size() != spec.n_x)
        throw std::invalid_argument("state vector length " + std::to_string(x.size()) +
                                    " does not match spec n_x=" + std::to_string(spec.n_x));
    if (u.size() != spec.n_u)
        throw std::invalid_argument("input vector length " + std::to_string(u.size()) +
                                    " does not match spec n_u=" + std::to_string(spec.n_u));
}

}  // namespace detail

inline double eval_term(const TermKind& t, const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    using detail::stacked_value;
    switch (t.tag) {
        case TermKind::Tag::Zero: return 0.0;
        case TermKind::Tag::Linear: return stacked_value(t.i, x, u);
        case TermKind::Tag::Abs: return std::abs(stacked_value(t.i, x, u));
        case TermKind::Tag::Cross: return stacked_value(t.i, x, u) * stacked_value(t.j, x, u);
        case TermKind::Tag::CrossAbs:
            return stacked_value(t.i, x, u) * std::abs(stacked_value(t.j, x, u));
    }
    return 0.0;
}

/// Literal evaluation of the full n_theta x n_f regressor matrix.
inline Eigen::MatrixXd eval_regressor(const RegressorSpec& spec, const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& u) {
    detail::check_dims(spec, x, u);
    Eigen::MatrixXd out(spec.n_theta, spec.n_f);
    for (int p = 0; p < spec.n_theta; ++p)
        for (int f = 0; f < spec.n_f; ++f) out(p, f) = eval_term(spec.at(p, f), x, u);
    return out;
}

/// Phi^T(x,u) * theta.
inline Eigen::VectorXd eval_som(const RegressorSpec& spec, const Eigen::VectorXd& theta,
                                const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
    if (theta.size() != spec.n_theta)
        throw std::invalid_argument("parameter vector length " + std::to_string(theta.size()) +
                                    " does not match spec n_theta=" +
                                    std::to_string(spec.n_theta));
    return eval_regressor(spec, x, u).transpose() * theta;
}

}  // namespace somid
