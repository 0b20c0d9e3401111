#pragma once

// One regularized integration step in a single torus variable, and its iteration.
//
// Every Zhat(z - p_i) carries the same antiholomorphic part, so with W = Zhat(z - p_0)
// the differences D_i = Zhat(z - p_i) - W are meromorphic and elliptic. Writing the
// integrand as a polynomial in W with D-valued coefficients, the W-antiderivative G
// satisfies dbar(G dz) = -2 pi i F dz ^ dzbar / (taubar - tau), and the integral is the
// sum of the holomorphic residues of G over the poles of the active variable.

#include <algorithm>
#include <complex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ellreg/error.hpp"
#include "ellreg/expr.hpp"
#include "ellreg/kernel.hpp"

namespace ellreg
{

/// Polynomial sum_k coeffs[k] W^k in W = Zhat(z_active - z_anchor).
///
/// Inside coeffs, a Zhat atom in the active variable other than W itself stands for the
/// meromorphic difference: the atom with value s Zhat(z_active - z_r) means s (Zhat(z_active - z_r) - W).
struct w_polynomial
{
    int active = 0;
    int anchor = 0;
    std::vector<expr> coeffs;

    int degree() const
    {
        return static_cast<int>(coeffs.size()) - 1;
    }
};

namespace detail
{

inline int orientation(const atom &x, int active)
{
    return x.a == active ? 1 : -1;
}

inline void accumulate(std::vector<expr> &into, const std::vector<expr> &poly)
{
    if (into.size() < poly.size()) {
        into.resize(poly.size());
    }
    for (std::size_t k = 0; k < poly.size(); ++k) {
        into[k] += poly[k];
    }
}

inline void trim(std::vector<expr> &coeffs)
{
    while (!coeffs.empty() && coeffs.back().is_zero()) {
        coeffs.pop_back();
    }
    if (coeffs.empty()) {
        coeffs.emplace_back();
    }
}

} // namespace detail

inline w_polynomial rewrite_in_w(const expr &f, int active, int anchor)
{
    if (!f.involves(active)) {
        throw error(errc::no_poles, "integrand is constant in z_" + std::to_string(active));
    }
    if (anchor == active) {
        throw error(errc::invalid_argument, "anchor must differ from the active point");
    }
    w_polynomial out{active, anchor, {}};
    for (const auto &[atoms, c] : f.terms()) {
        expr::monomial rest;
        std::vector<atom> zhats;
        for (const auto &x : atoms) {
            if (x.kind == atom_kind::zhat && x.involves(active)) {
                zhats.push_back(x);
            } else {
                rest.push_back(x);
            }
        }
        expr base;
        base.add_term(std::move(rest), c);
        std::vector<expr> poly{base};
        for (const auto &x : zhats) {
            const double s = detail::orientation(x, active);
            std::vector<expr> next(poly.size() + 1);
            const bool is_w = x.other(active) == anchor;
            for (std::size_t k = 0; k < poly.size(); ++k) {
                next[k + 1] += poly[k] * cplx(s);
                if (!is_w) {
                    next[k] += poly[k] * expr::from_atom(x);
                }
            }
            poly = std::move(next);
        }
        detail::accumulate(out.coeffs, poly);
    }
    detail::trim(out.coeffs);
    return out;
}

inline w_polynomial primitive_in_w(const w_polynomial &p)
{
    w_polynomial out{p.active, p.anchor, {}};
    out.coeffs.resize(p.coeffs.size() + 1);
    for (std::size_t k = 0; k < p.coeffs.size(); ++k) {
        out.coeffs[k + 1] = p.coeffs[k] * cplx(1.0 / static_cast<double>(k + 1));
    }
    detail::trim(out.coeffs);
    return out;
}

/// The plain expr sum_k coeffs[k] W^k with every difference atom expanded.
inline expr reassemble(const w_polynomial &p)
{
    const expr w = expr::zhat(p.active, p.anchor);
    expr out;
    expr w_power = expr::scalar(1.0);
    for (const auto &coeff : p.coeffs) {
        expr expanded;
        for (const auto &[atoms, c] : coeff.terms()) {
            expr term = expr::scalar(c);
            for (const auto &x : atoms) {
                if (x.kind == atom_kind::zhat && x.involves(p.active)) {
                    term = term * (expr::from_atom(x) - w * cplx(detail::orientation(x, p.active)));
                } else {
                    term = term * expr::from_atom(x);
                }
            }
            expanded += term;
        }
        out += expanded * w_power;
        w_power = w_power * w;
    }
    return out;
}

/// Holomorphic residue of G dz at z_active = z_q.
inline expr residue_at(const w_polynomial &g, int q, int jet_cap = default_jet_cap)
{
    if (q == g.active) {
        throw error(errc::invalid_argument, "residue point must differ from the active point");
    }
    return laurent_expand(reassemble(g), g.active, q, -1, jet_cap).residue();
}

struct anchor_policy
{
    std::optional<int> anchor; // empty: lowest-index pole point

    static anchor_policy lowest_pole() { return {}; }
    static anchor_policy fixed(int p) { return {p}; }
};

struct pole_residue
{
    int point = 0;
    expr residue;
};

struct step_trace
{
    int var = 0;
    int anchor = 0;
    std::vector<pole_residue> residues;
    expr result;
};

inline expr integrate_once(const expr &f, int active, anchor_policy policy = {}, step_trace *trace = nullptr,
                           int jet_cap = default_jet_cap)
{
    if (trace) {
        *trace = step_trace{active, 0, {}, {}};
    }
    if (!f.involves(active)) {
        if (trace) {
            trace->result = f;
        }
        return f;
    }
    std::set<int> candidates;
    for (const auto &[q, order] : poles_in(f, active)) {
        candidates.insert(q);
    }
    const int anchor = policy.anchor.value_or(*candidates.begin());
    if (anchor == active) {
        throw error(errc::invalid_argument, "anchor must differ from the active point");
    }
    candidates.insert(anchor);

    const w_polynomial g = primitive_in_w(rewrite_in_w(f, active, anchor));
    const expr full = reassemble(g);
    expr total;
    for (const int q : candidates) {
        expr r = laurent_expand(full, active, q, -1, jet_cap).residue();
        total += r;
        if (trace) {
            trace->residues.push_back({q, std::move(r)});
        }
    }
    if (trace) {
        trace->anchor = anchor;
        trace->result = total;
    }
    return total;
}

/// Folds integrate_once over the given order; the result must be free of points.
inline expr integrate_all_symbolic(const expr &f, const std::vector<int> &order,
                                   std::vector<step_trace> *traces = nullptr, int jet_cap = default_jet_cap)
{
    std::set<int> seen;
    for (const int p : order) {
        if (p < 1 || !seen.insert(p).second) {
            throw error(errc::invalid_argument, "integration order must list distinct positive point indices");
        }
    }
    for (const int p : f.points()) {
        if (!seen.count(p)) {
            throw error(errc::invalid_argument, "point " + std::to_string(p) + " missing from integration order");
        }
    }
    expr current = f;
    for (const int p : order) {
        step_trace t;
        current = integrate_once(current, p, {}, traces ? &t : nullptr, jet_cap);
        if (traces) {
            traces->push_back(std::move(t));
        }
    }
    if (!current.is_constant()) {
        throw error(errc::non_constant_result, "iterated integral retains point atoms: " + render_expr(current));
    }
    return current;
}

inline cplx integrate_all(const expr &f, const std::vector<int> &order, const modular_context &ctx,
                          std::vector<step_trace> *traces = nullptr)
{
    const expr c = integrate_all_symbolic(f, order, traces, ctx.jet_cap());
    return evaluate(c, ctx, {});
}

/// The points of f in increasing order.
inline std::vector<int> natural_order(const expr &f)
{
    const auto pts = f.points();
    return {pts.begin(), pts.end()};
}

/// Simple-pole residues of a meromorphic integrand at each of its poles in the active variable.
inline std::vector<pole_residue> polar_decomposition(const expr &f, int active, int jet_cap = default_jet_cap)
{
    for (const auto &[atoms, c] : f.terms()) {
        for (const auto &x : atoms) {
            if (x.kind == atom_kind::zhat && x.involves(active)) {
                throw error(errc::not_meromorphic, detail::render_atom(x) + " is not meromorphic in z_" +
                                                       std::to_string(active));
            }
        }
    }
    std::vector<pole_residue> out;
    for (const auto &[q, order] : poles_in(f, active)) {
        out.push_back({q, laurent_expand(f, active, q, -1, jet_cap).residue()});
    }
    return out;
}

} // namespace ellreg
