#pragma once

// Polynomial expressions in the atoms wp^{(m)}(z_a - z_b), Zhat(z_a - z_b) and the scalar
// constants pi, g2, g3, eta1hat, G_{2k}.
//
// An expr is a map from a sorted atom multiset to its complex coefficient; like terms are
// merged on insertion. Point atoms are stored with a < b; the parity rewrite
// wp^{(m)}(-u) = (-1)^m wp^{(m)}(u), Zhat(-u) = -Zhat(u) moves the sign into the coefficient.
// Constants stay symbolic until evaluation against a modular_context.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <system_error>
#include <tuple>
#include <utility>
#include <vector>

#include "ellreg/error.hpp"
#include "ellreg/kernel.hpp"
#include "ellreg/laurent.hpp"

namespace ellreg
{

enum class atom_kind : std::uint8_t
{
    pi,
    g2,
    g3,
    eta1hat,
    eisenstein, // G_{order}
    wp,         // wp^{(order)}(z_a - z_b)
    zhat,       // Zhat(z_a - z_b)
};

struct atom
{
    atom_kind kind = atom_kind::pi;
    int order = 0;
    int a = 0;
    int b = 0;

    auto operator<=>(const atom &) const = default;

    bool is_constant() const
    {
        return kind < atom_kind::wp;
    }
    bool involves(int p) const
    {
        return !is_constant() && (a == p || b == p);
    }
    int other(int p) const
    {
        return a == p ? b : a;
    }
    /// Pole order along z_a = z_b.
    int pole_order() const
    {
        if (kind == atom_kind::wp) {
            return order + 2;
        }
        return kind == atom_kind::zhat ? 1 : 0;
    }
};

/// Ratio below which a merged coefficient is treated as an exact cancellation.
inline constexpr double cancellation_tolerance = 1e-13;

class expr
{
    public:
        using monomial = std::vector<atom>;
        using term_map = std::map<monomial, cplx>;

        expr() = default;

        static expr scalar(cplx c)
        {
            expr e;
            e.add_term({}, c);
            return e;
        }

        /// The atom as written; must already be canonical.
        static expr from_atom(const atom &x, cplx c = 1.0)
        {
            expr e;
            e.add_term({x}, c);
            return e;
        }

        /// wp^{(m)}(z_a - z_b), oriented canonically.
        static expr wp(int m, int a, int b)
        {
            if (a == b) {
                throw error(errc::self_difference, "wp argument z_" + std::to_string(a) + " - z_" + std::to_string(a));
            }
            if (a < b) {
                return from_atom({atom_kind::wp, m, a, b});
            }
            return from_atom({atom_kind::wp, m, b, a}, m % 2 == 0 ? 1.0 : -1.0);
        }

        /// Zhat(z_a - z_b), oriented canonically.
        static expr zhat(int a, int b)
        {
            if (a == b) {
                throw error(errc::self_difference, "Z argument z_" + std::to_string(a) + " - z_" + std::to_string(a));
            }
            if (a < b) {
                return from_atom({atom_kind::zhat, 0, a, b});
            }
            return from_atom({atom_kind::zhat, 0, b, a}, -1.0);
        }

        static expr constant(atom_kind kind)
        {
            return from_atom({kind, 0, 0, 0});
        }

        /// G_{weight} as a symbol.
        static expr eisenstein(int weight)
        {
            if (weight < 4 || weight % 2 != 0) {
                throw error(errc::invalid_argument, "symbolic Eisenstein weight must be even and >= 4");
            }
            return from_atom({atom_kind::eisenstein, weight, 0, 0});
        }

        /// Adds c times the monomial; atoms must be canonical, any order.
        void add_term(monomial atoms, cplx c)
        {
            std::sort(atoms.begin(), atoms.end());
            add_sorted(std::move(atoms), c);
        }

        const term_map &terms() const { return m_terms; }
        bool is_zero() const { return m_terms.empty(); }
        std::size_t size() const { return m_terms.size(); }

        /// True when no term carries a point atom.
        bool is_constant() const
        {
            for (const auto &[atoms, c] : m_terms) {
                for (const auto &x : atoms) {
                    if (!x.is_constant()) {
                        return false;
                    }
                }
            }
            return true;
        }

        bool involves(int p) const
        {
            for (const auto &[atoms, c] : m_terms) {
                for (const auto &x : atoms) {
                    if (x.involves(p)) {
                        return true;
                    }
                }
            }
            return false;
        }

        std::set<int> points() const
        {
            std::set<int> out;
            for (const auto &[atoms, c] : m_terms) {
                for (const auto &x : atoms) {
                    if (!x.is_constant()) {
                        out.insert(x.a);
                        out.insert(x.b);
                    }
                }
            }
            return out;
        }

        expr &operator+=(const expr &o)
        {
            for (const auto &[atoms, c] : o.m_terms) {
                add_sorted(atoms, c);
            }
            return *this;
        }
        expr &operator-=(const expr &o)
        {
            for (const auto &[atoms, c] : o.m_terms) {
                add_sorted(atoms, -c);
            }
            return *this;
        }
        expr &operator*=(cplx s)
        {
            if (s == cplx(0.0)) {
                m_terms.clear();
                return *this;
            }
            for (auto &[atoms, c] : m_terms) {
                c *= s;
            }
            return *this;
        }

        friend expr operator+(expr a, const expr &b) { return a += b; }
        friend expr operator-(expr a, const expr &b) { return a -= b; }
        friend expr operator-(expr a) { return a *= -1.0; }
        friend expr operator*(expr a, cplx s) { return a *= s; }
        friend expr operator*(cplx s, expr a) { return a *= s; }

        friend expr operator*(const expr &a, const expr &b)
        {
            expr out;
            monomial merged;
            for (const auto &[xa, ca] : a.m_terms) {
                for (const auto &[xb, cb] : b.m_terms) {
                    merged.clear();
                    std::merge(xa.begin(), xa.end(), xb.begin(), xb.end(), std::back_inserter(merged));
                    out.add_sorted(merged, ca * cb);
                }
            }
            return out;
        }

        friend bool operator==(const expr &a, const expr &b) { return a.m_terms == b.m_terms; }

    private:
        void add_sorted(const monomial &atoms, cplx c)
        {
            if (c == cplx(0.0)) {
                return;
            }
            auto [it, inserted] = m_terms.try_emplace(atoms, c);
            if (inserted) {
                return;
            }
            const cplx before = it->second;
            it->second += c;
            const double scale = std::max(std::abs(before), std::abs(c));
            if (std::abs(it->second) <= cancellation_tolerance * scale) {
                m_terms.erase(it);
            }
        }

        term_map m_terms;
};

template <>
struct ring_traits<expr>
{
    static expr zero() { return {}; }
    static expr one() { return expr::scalar(1.0); }
    static expr add(const expr &a, const expr &b) { return a + b; }
    static expr neg(const expr &a) { return -a; }
    static expr mul(const expr &a, const expr &b) { return a * b; }
    static bool is_zero(const expr &a) { return a.is_zero(); }
    static expr mul_int(const expr &a, long n) { return a * cplx(static_cast<double>(n)); }
    static expr div_int(const expr &a, long n) { return a * cplx(1.0 / static_cast<double>(n)); }
};

using expr_series = laurent_series<expr>;

// ---------------------------------------------------------------------------------------------
// Rendering

namespace detail
{

inline std::string format_real(double x)
{
    if (x == 0.0) {
        return "0";
    }
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

inline std::string render_atom(const atom &x)
{
    switch (x.kind) {
        case atom_kind::pi: return "pi";
        case atom_kind::g2: return "g2";
        case atom_kind::g3: return "g3";
        case atom_kind::eta1hat: return "eta1h";
        case atom_kind::eisenstein: return "G" + std::to_string(x.order);
        case atom_kind::wp:
            return "wp" + std::string(static_cast<std::size_t>(x.order), '\'') + "(" + std::to_string(x.a) + "-" +
                   std::to_string(x.b) + ")";
        case atom_kind::zhat: return "Z(" + std::to_string(x.a) + "-" + std::to_string(x.b) + ")";
    }
    return "?";
}

inline std::string render_monomial(const expr::monomial &atoms)
{
    std::string out;
    for (std::size_t i = 0; i < atoms.size();) {
        std::size_t j = i;
        while (j < atoms.size() && atoms[j] == atoms[i]) {
            ++j;
        }
        if (!out.empty()) {
            out += "*";
        }
        out += render_atom(atoms[i]);
        if (j - i > 1) {
            out += "^" + std::to_string(j - i);
        }
        i = j;
    }
    return out;
}

} // namespace detail

inline std::string render_complex(cplx c)
{
    if (c.imag() == 0.0) {
        return detail::format_real(c.real());
    }
    return "(" + detail::format_real(c.real()) + "," + detail::format_real(c.imag()) + ")";
}

/// DSL text that parses back to the same normalized expression.
inline std::string render_expr(const expr &e)
{
    if (e.is_zero()) {
        return "0";
    }
    std::string out;
    for (const auto &[atoms, c] : e.terms()) {
        std::string piece;
        if (atoms.empty()) {
            piece = render_complex(c);
        } else if (c == cplx(1.0)) {
            piece = detail::render_monomial(atoms);
        } else if (c == cplx(-1.0)) {
            piece = "-" + detail::render_monomial(atoms);
        } else {
            piece = render_complex(c) + "*" + detail::render_monomial(atoms);
        }
        if (out.empty()) {
            out = piece;
        } else if (piece.front() == '-') {
            out += " - " + piece.substr(1);
        } else {
            out += " + " + piece;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Evaluation

using assignment = std::map<int, cplx>;

inline cplx constant_value(const atom &x, const modular_context &ctx)
{
    switch (x.kind) {
        case atom_kind::pi: return pi;
        case atom_kind::g2: return ctx.g2();
        case atom_kind::g3: return ctx.g3();
        case atom_kind::eta1hat: return ctx.eta1hat();
        case atom_kind::eisenstein: return ctx.eisenstein(x.order);
        default: break;
    }
    throw error(errc::invalid_argument, "not a constant atom");
}

inline cplx assigned(const assignment &assign, int p)
{
    const auto it = assign.find(p);
    if (it == assign.end()) {
        throw error(errc::invalid_argument, "point " + std::to_string(p) + " has no assigned value");
    }
    return it->second;
}

/// Numeric value of E with points placed by assign.
inline cplx evaluate(const expr &e, const modular_context &ctx, const assignment &assign)
{
    // Highest wp derivative needed per ordered pair, so each pair costs one jet.
    std::map<std::pair<int, int>, int> wp_orders;
    for (const auto &[atoms, c] : e.terms()) {
        for (const auto &x : atoms) {
            if (x.kind == atom_kind::wp) {
                auto &slot = wp_orders.try_emplace({x.a, x.b}, 0).first->second;
                slot = std::max(slot, x.order);
            }
        }
    }
    auto argument = [&](const atom &x) {
        const cplx u = assigned(assign, x.a) - assigned(assign, x.b);
        if (lattice_distance(ctx, u) < pole_threshold) {
            throw error(errc::pole_hit, detail::render_atom(x) + " evaluated at a lattice point");
        }
        return u;
    };
    std::map<std::pair<int, int>, std::vector<cplx>> wp_values;
    for (const auto &[pair, m] : wp_orders) {
        wp_values.emplace(pair, wp_jet(ctx, argument({atom_kind::wp, m, pair.first, pair.second}), m));
    }
    std::map<atom, cplx> other_values;
    auto value_of = [&](const atom &x) -> cplx {
        if (x.kind == atom_kind::wp) {
            return wp_values.at({x.a, x.b})[static_cast<std::size_t>(x.order)];
        }
        auto it = other_values.find(x);
        if (it != other_values.end()) {
            return it->second;
        }
        const cplx v = x.kind == atom_kind::zhat ? zhat_value(ctx, argument(x)) : constant_value(x, ctx);
        other_values.emplace(x, v);
        return v;
    };
    cplx total = 0.0;
    for (const auto &[atoms, c] : e.terms()) {
        cplx t = c;
        for (const auto &x : atoms) {
            t *= value_of(x);
        }
        total += t;
    }
    return total;
}

// ---------------------------------------------------------------------------------------------
// Calculus

/// Holomorphic d/dz_p. Zhat' is rewritten as -(wp + eta1hat) on the spot.
inline expr differentiate(const expr &e, int p)
{
    expr out;
    for (const auto &[atoms, c] : e.terms()) {
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            const atom &x = atoms[i];
            if (!x.involves(p)) {
                continue;
            }
            if (i > 0 && atoms[i - 1] == x) {
                continue; // repeated factor handled with its multiplicity below
            }
            std::size_t mult = 1;
            while (i + mult < atoms.size() && atoms[i + mult] == x) {
                ++mult;
            }
            const double chain = x.a == p ? 1.0 : -1.0;
            expr rest;
            {
                expr::monomial remaining;
                remaining.reserve(atoms.size() - 1);
                for (std::size_t j = 0; j < atoms.size(); ++j) {
                    if (j != i) {
                        remaining.push_back(atoms[j]);
                    }
                }
                rest.add_term(std::move(remaining), c * static_cast<double>(mult) * chain);
            }
            expr dx;
            if (x.kind == atom_kind::wp) {
                dx = expr::from_atom({atom_kind::wp, x.order + 1, x.a, x.b});
            } else {
                dx = -(expr::from_atom({atom_kind::wp, 0, x.a, x.b}) + expr::constant(atom_kind::eta1hat));
            }
            out += rest * dx;
        }
    }
    return out;
}

/// For each other point q, the worst-case pole order of E along z_p = z_q.
inline std::vector<std::pair<int, int>> poles_in(const expr &e, int p)
{
    std::map<int, int> worst;
    for (const auto &[atoms, c] : e.terms()) {
        std::map<int, int> here;
        for (const auto &x : atoms) {
            if (x.involves(p)) {
                here[x.other(p)] += x.pole_order();
            }
        }
        for (const auto &[q, order] : here) {
            auto &slot = worst[q];
            slot = std::max(slot, order);
        }
    }
    return {worst.begin(), worst.end()};
}

namespace detail
{

inline expr_series substitute_sign(const expr_series &s, int sign)
{
    if (sign > 0 || s.is_zero()) {
        return s;
    }
    std::vector<expr> coeffs = s.coeffs();
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const int exponent = s.lead_exponent() + static_cast<int>(i);
        if (exponent % 2 != 0) {
            coeffs[i] = -coeffs[i];
        }
    }
    return expr_series(s.lead_exponent(), std::move(coeffs), s.trunc_order());
}

inline double falling_factorial(int e, int m)
{
    double f = 1.0;
    for (int i = 0; i < m; ++i) {
        f *= static_cast<double>(e - i);
    }
    return f;
}

/// wp^{(m)}(t) = d^m/dt^m [t^-2 + sum_{k>=2} (2k-1) 2 G_{2k} t^{2k-2}] up to t^trunc.
inline expr_series wp_pole_series(int m, int trunc)
{
    const int lead = -2 - m;
    if (trunc < lead) {
        return expr_series::zero(trunc);
    }
    std::vector<expr> coeffs(static_cast<std::size_t>(trunc - lead + 1));
    coeffs[0] = expr::scalar(falling_factorial(-2, m));
    for (int k = 2;; ++k) {
        const int base = 2 * k - 2;
        const int exponent = base - m;
        if (exponent > trunc) {
            break;
        }
        if (base < m) {
            continue;
        }
        coeffs[static_cast<std::size_t>(exponent - lead)] =
            expr::eisenstein(2 * k) * cplx((2.0 * k - 1.0) * 2.0 * falling_factorial(base, m));
    }
    return expr_series(lead, std::move(coeffs), trunc);
}

/// Zhat(t) = t^-1 - eta1hat t - sum_{k>=2} 2 G_{2k} t^{2k-1}, holomorphic part only.
inline expr_series zhat_pole_series(int trunc)
{
    if (trunc < -1) {
        return expr_series::zero(trunc);
    }
    std::vector<expr> coeffs(static_cast<std::size_t>(trunc + 2));
    coeffs[0] = expr::scalar(1.0);
    for (int e = 1; e <= trunc; e += 2) {
        coeffs[static_cast<std::size_t>(e + 1)] =
            e == 1 ? -expr::constant(atom_kind::eta1hat) : expr::eisenstein(e + 1) * cplx(-2.0);
    }
    return expr_series(-1, std::move(coeffs), trunc);
}

/// wp^{(m)}(z_x - z_y + t) as a Taylor series in t.
inline expr_series wp_taylor_series(int m, int x, int y, int trunc)
{
    if (trunc < 0) {
        return expr_series::zero(trunc);
    }
    std::vector<expr> coeffs(static_cast<std::size_t>(trunc) + 1);
    for (int j = 0; j <= trunc; ++j) {
        coeffs[static_cast<std::size_t>(j)] = expr::wp(m + j, x, y) * cplx(1.0 / factorial(j));
    }
    return expr_series(0, std::move(coeffs), trunc);
}

/// Holomorphic Taylor series of Zhat(z_x - z_y + t): the wbar part never reaches a residue.
inline expr_series zhat_taylor_series(int x, int y, int trunc)
{
    if (trunc < 0) {
        return expr_series::zero(trunc);
    }
    std::vector<expr> coeffs(static_cast<std::size_t>(trunc) + 1);
    coeffs[0] = expr::zhat(x, y);
    if (trunc >= 1) {
        coeffs[1] = -(expr::wp(0, x, y) + expr::constant(atom_kind::eta1hat));
    }
    for (int j = 2; j <= trunc; ++j) {
        coeffs[static_cast<std::size_t>(j)] = expr::wp(j - 1, x, y) * cplx(-1.0 / factorial(j));
    }
    return expr_series(0, std::move(coeffs), trunc);
}

/// Series of a single point atom in w, where z_p = z_q + w.
inline expr_series atom_series(const atom &x, int p, int q, int trunc)
{
    const int sign = x.a == p ? 1 : -1;
    const int other = x.other(p);
    expr_series s;
    if (other == q) {
        s = x.kind == atom_kind::wp ? wp_pole_series(x.order, trunc) : zhat_pole_series(trunc);
    } else {
        // The argument is z_a - z_b with z_p replaced by z_q.
        const int na = x.a == p ? q : x.a;
        const int nb = x.b == p ? q : x.b;
        s = x.kind == atom_kind::wp ? wp_taylor_series(x.order, na, nb, trunc) : zhat_taylor_series(na, nb, trunc);
    }
    return substitute_sign(s, sign);
}

} // namespace detail

/// Expansion of E at z_p = z_q + w up to w^order, with expr coefficients in the remaining points.
inline expr_series laurent_expand(const expr &e, int p, int q, int order, int jet_cap = default_jet_cap)
{
    if (p == q) {
        throw error(errc::invalid_argument, "expansion point must differ from the active point");
    }
    if (order > jet_cap) {
        throw error(errc::jet_cap_exceeded, "expansion order " + std::to_string(order) + " exceeds jet cap");
    }
    std::map<std::pair<atom, int>, expr_series> cache;
    auto series_for = [&](const atom &x, int trunc) -> const expr_series & {
        auto key = std::make_pair(x, trunc);
        auto it = cache.find(key);
        if (it == cache.end()) {
            if (trunc > jet_cap) {
                throw error(errc::jet_cap_exceeded,
                            "factor expansion to order " + std::to_string(trunc) + " exceeds jet cap");
            }
            it = cache.emplace(key, detail::atom_series(x, p, q, trunc)).first;
        }
        return it->second;
    };

    expr_series result = expr_series::zero(order);
    for (const auto &[atoms, c] : e.terms()) {
        expr::monomial fixed;
        std::vector<atom> moving;
        int total_lead = 0;
        for (const auto &x : atoms) {
            if (x.involves(p)) {
                moving.push_back(x);
                if (x.other(p) == q) {
                    total_lead -= x.pole_order();
                }
            } else {
                fixed.push_back(x);
            }
        }
        if (order < total_lead) {
            continue;
        }
        expr constant_part;
        constant_part.add_term(std::move(fixed), c);
        if (moving.empty()) {
            result = add(result, expr_series::monomial(constant_part, 0, order));
            continue;
        }
        std::optional<expr_series> product;
        for (const auto &x : moving) {
            const int own_lead = x.other(p) == q ? -x.pole_order() : 0;
            const auto &s = series_for(x, order - (total_lead - own_lead));
            product = product ? mul(*product, s) : s;
        }
        result = add(result, scale(constant_part, *product));
    }
    return result;
}

} // namespace ellreg
