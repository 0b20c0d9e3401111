#pragma once

// Numerical oracles for a single integration step, independent of the Laurent engine.
//
// pv_single_step: excision integral I(eps) of F over the torus minus flat disks of radius
// eps around the poles, with the measure dz ^ dzbar / (taubar - tau) = dA / Im tau, then
// extrapolated to eps = 0. A smooth radial partition of unity chi_i (equal to 1 on the largest
// excision disk, supported in the patch disk) splits the integral into
//   - sum_i int_{eps < r < R} chi_i F          polar patches: Gauss in r, trapezoid in theta
//   - int_E (1 - sum_i chi_i) F                smooth and doubly periodic: tensor trapezoid
// The trapezoid rules are spectrally accurate on both pieces, and on a disk the angular
// average of F is an even polynomial in r, so I(eps) = I(0) + a eps^2 + b eps^4 + ...
//
// contour_contact_check: -int F u dz over the boundary plus 2 pi i times the residues of
// F u_hol, with u = (zbar - z)/(taubar - tau). Residues come from small-circle contour sums
// of exact function values; the boundary reduces to one edge because u is 1-periodic and
// jumps by 1 across the tau edge.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "ellreg/error.hpp"
#include "ellreg/expr.hpp"
#include "ellreg/kernel.hpp"

namespace ellreg
{

enum class extrapolation_kind
{
    even_powers, // polynomial in eps^2
    linear,      // polynomial in eps
    eps_log_eps, // 1, eps^2, eps log eps, eps, eps^4, ...
};

inline std::string_view to_string(extrapolation_kind k)
{
    switch (k) {
        case extrapolation_kind::even_powers: return "even-powers";
        case extrapolation_kind::linear: return "linear";
        case extrapolation_kind::eps_log_eps: return "eps-log-eps";
    }
    return "?";
}

struct pv_options
{
    std::vector<double> eps_list{0.2, 0.1, 0.05};
    double patch_radius = 0.35;
    int radial_nodes = 24;  // Gauss-Legendre nodes per radial panel
    int angular_nodes = 64; // trapezoid nodes on each circle
    int panel_nodes = 512;  // trapezoid nodes per lattice direction
    extrapolation_kind extrapolation = extrapolation_kind::even_powers;
    double tolerance = 1e-6; // on extrapolated_error / max(1, |value|)
    cplx domain_offset = 0.0;
    unsigned threads = 0; // 0: hardware concurrency
};

struct pv_report
{
    cplx value;
    std::vector<double> eps_used;
    std::vector<cplx> per_eps_values;
    double extrapolated_error = 0.0;
    bool converged = false;
    double patch_radius = 0.0;
};

/// F with every point except the active one fixed, evaluated as a function of z.
class bound_integrand
{
    public:
        bound_integrand(const expr &f, int active, const assignment &assign, const modular_context &ctx)
            : m_ctx(&ctx)
        {
            std::map<int, std::size_t> slot_of;
            for (const auto &[atoms, c] : f.terms()) {
                expr::monomial fixed;
                bound_term term;
                for (const auto &x : atoms) {
                    if (!x.involves(active)) {
                        fixed.push_back(x);
                        continue;
                    }
                    const int q = x.other(active);
                    auto [it, fresh] = slot_of.try_emplace(q, m_slots.size());
                    if (fresh) {
                        m_slots.push_back({q, assigned(assign, q), -1, false});
                    }
                    auto &slot = m_slots[it->second];
                    double sign = 1.0;
                    if (x.kind == atom_kind::wp) {
                        slot.max_wp_order = std::max(slot.max_wp_order, x.order);
                        if (x.a != active && x.order % 2 != 0) {
                            sign = -1.0;
                        }
                    } else {
                        slot.needs_zhat = true;
                        if (x.a != active) {
                            sign = -1.0;
                        }
                    }
                    term.factors.push_back({it->second, x.kind, x.order, sign});
                }
                expr fixed_part;
                fixed_part.add_term(std::move(fixed), c);
                term.constant = evaluate(fixed_part, ctx, assign);
                m_terms.push_back(std::move(term));
            }
            for (std::size_t i = 0; i < m_slots.size(); ++i) {
                for (std::size_t j = i + 1; j < m_slots.size(); ++j) {
                    if (lattice_distance(ctx, m_slots[i].position - m_slots[j].position) < pole_threshold) {
                        throw error(errc::pole_hit, "points " + std::to_string(m_slots[i].point) + " and " +
                                                        std::to_string(m_slots[j].point) + " coincide mod the lattice");
                    }
                }
            }
        }

        /// Positions of the poles in the active variable, one per other point.
        std::vector<cplx> poles() const
        {
            std::vector<cplx> out;
            for (const auto &s : m_slots) {
                out.push_back(s.position);
            }
            return out;
        }

        cplx operator()(cplx z) const
        {
            thread_local std::vector<std::vector<cplx>> wp_values;
            thread_local std::vector<cplx> zhat_values;
            wp_values.resize(m_slots.size());
            zhat_values.resize(m_slots.size());
            for (std::size_t i = 0; i < m_slots.size(); ++i) {
                const auto &s = m_slots[i];
                const cplx u = z - s.position;
                if (s.max_wp_order >= 0) {
                    wp_values[i] = wp_jet(*m_ctx, u, s.max_wp_order);
                }
                if (s.needs_zhat) {
                    zhat_values[i] = zhat_value(*m_ctx, u);
                }
            }
            cplx total = 0.0;
            for (const auto &t : m_terms) {
                cplx v = t.constant;
                for (const auto &f : t.factors) {
                    const cplx raw = f.kind == atom_kind::wp ? wp_values[f.slot][static_cast<std::size_t>(f.order)]
                                                             : zhat_values[f.slot];
                    v *= f.sign * raw;
                }
                total += v;
            }
            return total;
        }

    private:
        struct slot_info
        {
            int point;
            cplx position;
            int max_wp_order;
            bool needs_zhat;
        };
        struct factor
        {
            std::size_t slot;
            atom_kind kind;
            int order;
            double sign;
        };
        struct bound_term
        {
            cplx constant;
            std::vector<factor> factors;
        };

        const modular_context *m_ctx;
        std::vector<slot_info> m_slots;
        std::vector<bound_term> m_terms;
};

namespace detail
{

/// Gauss-Legendre nodes and weights on [-1, 1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n)
{
    std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            const double step = p1 / dp;
            z -= step;
            if (std::abs(step) < 1e-16) {
                break;
            }
        }
        x[static_cast<std::size_t>(i)] = z;
        w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return {x, w};
}

/// C-infinity step: 1 at x <= 0, 0 at x >= 1.
inline double smooth_step_down(double x)
{
    if (x <= 0.0) {
        return 1.0;
    }
    if (x >= 1.0) {
        return 0.0;
    }
    const double a = std::exp(-1.0 / (1.0 - x));
    const double b = std::exp(-1.0 / x);
    return a / (a + b);
}

/// Deterministic pairwise sum.
inline cplx pairwise_sum(const cplx *v, std::size_t n)
{
    if (n == 0) {
        return 0.0;
    }
    if (n <= 8) {
        cplx s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s += v[i];
        }
        return s;
    }
    const std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

inline unsigned worker_count(unsigned requested)
{
    if (requested > 0) {
        return requested;
    }
    return std::clamp(std::thread::hardware_concurrency(), 1u, 16u);
}

/// Runs body(row) for rows 0..n-1 across threads; results are written by row index.
template <typename Body>
void parallel_rows(int n, unsigned threads, Body body)
{
    const unsigned count = std::min<unsigned>(worker_count(threads), static_cast<unsigned>(std::max(n, 1)));
    if (count <= 1) {
        for (int r = 0; r < n; ++r) {
            body(r);
        }
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(count);
    for (unsigned k = 0; k < count; ++k) {
        pool.emplace_back([&, k] {
            try {
                for (int r = static_cast<int>(k); r < n; r += static_cast<int>(count)) {
                    body(r);
                }
            } catch (...) {
                failures[k] = std::current_exception();
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    for (auto &f : failures) {
        if (f) {
            std::rethrow_exception(f);
        }
    }
}

inline std::vector<double> basis_row(extrapolation_kind kind, double eps, std::size_t n)
{
    std::vector<double> row;
    row.reserve(n);
    for (std::size_t k = 0; row.size() < n; ++k) {
        switch (kind) {
            case extrapolation_kind::even_powers: row.push_back(std::pow(eps, 2.0 * static_cast<double>(k))); break;
            case extrapolation_kind::linear: row.push_back(std::pow(eps, static_cast<double>(k))); break;
            case extrapolation_kind::eps_log_eps: {
                static constexpr int kinds[] = {0, 2, -1, 1, 4, 3, 6, 5, 8};
                const int p = kinds[std::min<std::size_t>(k, std::size(kinds) - 1)];
                row.push_back(p < 0 ? eps * std::log(eps) : std::pow(eps, p));
                break;
            }
        }
    }
    return row;
}

/// Value at eps = 0 of the interpolant through (eps_k, values_k) in the chosen basis.
inline cplx extrapolate_to_zero(extrapolation_kind kind, const std::vector<double> &eps, const std::vector<cplx> &values)
{
    const std::size_t n = eps.size();
    std::vector<std::vector<cplx>> a(n, std::vector<cplx>(n + 1));
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = basis_row(kind, eps[i], n);
        for (std::size_t j = 0; j < n; ++j) {
            a[i][j] = row[j];
        }
        a[i][n] = values[i];
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) {
                piv = r;
            }
        }
        std::swap(a[col], a[piv]);
        if (std::abs(a[col][col]) == 0.0) {
            throw error(errc::invalid_argument, "degenerate excision radii");
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) {
                continue;
            }
            const cplx f = a[r][col] / a[col][col];
            for (std::size_t j = col; j <= n; ++j) {
                a[r][j] -= f * a[col][j];
            }
        }
    }
    // Every basis starts with the constant 1, so the intercept is the first unknown.
    return a[0][n] / a[0][0];
}

struct patch_geometry
{
    std::vector<cplx> centers;
    double inner = 0.0;  // chi = 1 below this radius
    double radius = 0.0; // chi = 0 beyond
    std::vector<double> eps;

    double chi(double r) const
    {
        return smooth_step_down((r - inner) / (radius - inner));
    }
};

inline patch_geometry make_geometry(const modular_context &ctx, const std::vector<cplx> &poles, const pv_options &opts)
{
    if (opts.eps_list.size() < 2) {
        throw error(errc::invalid_argument, "at least two excision radii are needed");
    }
    for (std::size_t i = 0; i < opts.eps_list.size(); ++i) {
        if (!(opts.eps_list[i] > 0.0) || (i > 0 && !(opts.eps_list[i] < opts.eps_list[i - 1]))) {
            throw error(errc::invalid_argument, "eps_list must be positive and strictly decreasing");
        }
    }
    if (!(opts.patch_radius > 0.0) || opts.radial_nodes < 2 || opts.angular_nodes < 8 || opts.panel_nodes < 16 ||
        opts.angular_nodes % 4 != 0 || opts.panel_nodes % 4 != 0) {
        throw error(errc::invalid_argument, "quadrature resolutions must be multiples of 4 and not tiny");
    }
    patch_geometry g;
    g.centers = poles;
    const double shortest = std::min({std::abs(1.0 - 0.0 * ctx.tau()), std::abs(ctx.tau()),
                                      std::abs(ctx.tau() - 1.0), std::abs(ctx.tau() + 1.0)});
    double radius = std::min(opts.patch_radius, 0.45 * shortest);
    for (std::size_t i = 0; i < poles.size(); ++i) {
        for (std::size_t j = i + 1; j < poles.size(); ++j) {
            radius = std::min(radius, 0.5 * lattice_distance(ctx, poles[i] - poles[j]));
        }
    }
    g.radius = radius;
    g.eps = opts.eps_list;
    // The transition band of chi needs room; shrink the radii rather than steepen it.
    const double cap = 0.6 * radius;
    if (g.eps.front() > cap) {
        const double f = cap / g.eps.front();
        for (auto &e : g.eps) {
            e *= f;
        }
    }
    g.inner = g.eps.front();
    return g;
}

/// Bulk term: int over the torus of (1 - sum chi_i) F, at full and half resolution.
/// One quadrature value at full, half and quarter resolution.
struct levels
{
    cplx full;
    cplx half;
    cplx quarter;

    levels &operator+=(const levels &o)
    {
        full += o.full;
        half += o.half;
        quarter += o.quarter;
        return *this;
    }
    friend levels operator*(double s, levels l)
    {
        l.full *= s;
        l.half *= s;
        l.quarter *= s;
        return l;
    }
};

/// Error of the full-resolution value: the half-to-full difference shrunk by the observed
/// contraction ratio, but never by more than 10 (the partition of unity is smooth, not
/// analytic, so convergence is fast without being strictly geometric).
inline double level_error(const levels &l)
{
    const double d_fine = std::abs(l.full - l.half);
    const double d_coarse = std::abs(l.half - l.quarter);
    if (d_coarse > 0.0 && d_fine < 0.5 * d_coarse) {
        return d_fine * std::max(d_fine / d_coarse, 0.1);
    }
    return d_fine;
}

inline levels bulk_integral(const bound_integrand &f, const modular_context &ctx, const patch_geometry &g,
                            const pv_options &opts)
{
    const int n = opts.panel_nodes;
    std::vector<cplx> rows(static_cast<std::size_t>(n)), rows_half(static_cast<std::size_t>(n)),
        rows_quarter(static_cast<std::size_t>(n));
    parallel_rows(n, opts.threads, [&](int j) {
        std::vector<cplx> vals(static_cast<std::size_t>(n)), half, quarter;
        half.reserve(static_cast<std::size_t>(n / 2));
        quarter.reserve(static_cast<std::size_t>(n / 4));
        const double t = (j + 0.5) / n;
        for (int i = 0; i < n; ++i) {
            const double s = (i + 0.5) / n;
            const cplx z = opts.domain_offset + s + t * ctx.tau();
            double weight = 1.0;
            for (const auto &c : g.centers) {
                weight -= g.chi(lattice_distance(ctx, z - c));
            }
            cplx v = 0.0;
            if (weight > 0.0) {
                v = weight * f(z);
            }
            vals[static_cast<std::size_t>(i)] = v;
            if (i % 2 == 0) {
                half.push_back(v);
            }
            if (i % 4 == 0) {
                quarter.push_back(v);
            }
        }
        const auto idx = static_cast<std::size_t>(j);
        rows[idx] = detail::pairwise_sum(vals.data(), vals.size());
        rows_half[idx] = j % 2 == 0 ? detail::pairwise_sum(half.data(), half.size()) : cplx(0.0);
        rows_quarter[idx] = j % 4 == 0 ? detail::pairwise_sum(quarter.data(), quarter.size()) : cplx(0.0);
    });
    const double h = 1.0 / n;
    return {pairwise_sum(rows.data(), rows.size()) * h * h,
            pairwise_sum(rows_half.data(), rows_half.size()) * (4.0 * h * h),
            pairwise_sum(rows_quarter.data(), rows_quarter.size()) * (16.0 * h * h)};
}

/// Angular average of f over the circle |z - c| = r with m, m/2 and m/4 nodes.
inline levels circle_average(const bound_integrand &f, cplx c, double r, int m)
{
    std::vector<cplx> vals(static_cast<std::size_t>(m)), half, quarter;
    for (int k = 0; k < m; ++k) {
        const double th = 2.0 * pi * (k + 0.5) / m;
        vals[static_cast<std::size_t>(k)] = f(c + std::polar(r, th));
    }
    // Subsets keep every second (fourth) node, so the coarse rules are rotated copies.
    for (int k = 0; k < m; k += 2) {
        half.push_back(vals[static_cast<std::size_t>(k)]);
        if (k % 4 == 0) {
            quarter.push_back(vals[static_cast<std::size_t>(k)]);
        }
    }
    return {pairwise_sum(vals.data(), vals.size()) / static_cast<double>(m),
            pairwise_sum(half.data(), half.size()) / static_cast<double>(half.size()),
            pairwise_sum(quarter.data(), quarter.size()) / static_cast<double>(quarter.size())};
}

/// int_a^b r chi(r) <F>(r) dr summed over patches, with Gauss on `panels` equal panels.
inline levels patch_radial(const bound_integrand &f, const patch_geometry &g, double a, double b, int panels,
                           const pv_options &opts)
{
    auto run = [&](int nodes, int level) {
        const auto [x, w] = gauss_legendre(nodes);
        cplx total = 0.0;
        for (const auto &c : g.centers) {
            for (int p = 0; p < panels; ++p) {
                const double lo = a + (b - a) * p / panels;
                const double hi = a + (b - a) * (p + 1) / panels;
                for (std::size_t k = 0; k < x.size(); ++k) {
                    const double r = 0.5 * (hi + lo) + 0.5 * (hi - lo) * x[k];
                    const auto avg = circle_average(f, c, r, opts.angular_nodes);
                    const cplx pick = level == 0 ? avg.full : level == 1 ? avg.half : avg.quarter;
                    total += 0.5 * (hi - lo) * w[k] * r * g.chi(r) * pick;
                }
            }
        }
        return total;
    };
    return {run(opts.radial_nodes, 0), run(std::max(2, opts.radial_nodes / 2), 1),
            run(std::max(2, opts.radial_nodes / 4), 2)};
}

} // namespace detail

/// Principal value of int F dz ^ dzbar / (taubar - tau) over the active variable.
inline pv_report pv_single_step(const expr &f, int active, const assignment &assign, const modular_context &ctx,
                                const pv_options &opts = {})
{
    assignment fixed = assign;
    fixed.erase(active);
    const bound_integrand integrand(f, active, fixed, ctx);
    const auto poles = integrand.poles();
    const auto g = detail::make_geometry(ctx, poles, opts);

    const double to_measure = 2.0 * pi / ctx.im_tau();
    detail::levels shared = detail::bulk_integral(integrand, ctx, g, opts);
    shared += to_measure * detail::patch_radial(integrand, g, g.inner, g.radius, 4, opts);

    pv_report rep;
    rep.patch_radius = poles.empty() ? 0.0 : g.radius;
    rep.eps_used = g.eps;
    double inner_error = 0.0;
    for (const double eps : g.eps) {
        cplx inner = 0.0;
        if (!poles.empty() && eps < g.inner) {
            const auto part = to_measure * detail::patch_radial(integrand, g, eps, g.inner, 1, opts);
            inner = part.full;
            inner_error = std::max(inner_error, detail::level_error(part));
        }
        rep.per_eps_values.push_back(shared.full + inner);
    }
    const double shared_error = detail::level_error(shared);
    const double quadrature_error = shared_error + inner_error;
    for (const auto &v : rep.per_eps_values) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
            throw error(errc::non_convergence, "non-finite excision value");
        }
    }

    const auto &vals = rep.per_eps_values;
    const double scale = std::max(1.0, std::abs(vals.back()));
    if (vals.size() >= 3) {
        for (std::size_t k = 2; k < vals.size(); ++k) {
            const double prev = std::abs(vals[k - 1] - vals[k - 2]);
            const double cur = std::abs(vals[k] - vals[k - 1]);
            if (cur > prev && cur > 1e-9 * scale) {
                throw error(errc::non_convergence, "excision values do not stabilize as eps decreases");
            }
        }
    }

    rep.value = detail::extrapolate_to_zero(opts.extrapolation, g.eps, vals);
    const std::vector<double> eps_tail(g.eps.begin() + 1, g.eps.end());
    const std::vector<cplx> vals_tail(vals.begin() + 1, vals.end());
    const cplx reduced = detail::extrapolate_to_zero(opts.extrapolation, eps_tail, vals_tail);
    rep.extrapolated_error = std::abs(rep.value - reduced) + quadrature_error;
    rep.converged = rep.extrapolated_error < opts.tolerance * std::max(1.0, std::abs(rep.value));
    return rep;
}

/// Integral of a meromorphic F via boundary term plus residues of F u.
inline cplx contour_contact_check(const expr &f, int active, const assignment &assign, const modular_context &ctx)
{
    for (const auto &[atoms, c] : f.terms()) {
        for (const auto &x : atoms) {
            if (x.kind == atom_kind::zhat && x.involves(active)) {
                throw error(errc::not_meromorphic, "contour formula needs F meromorphic in z_" + std::to_string(active));
            }
        }
    }
    assignment fixed = assign;
    fixed.erase(active);
    const bound_integrand integrand(f, active, fixed, ctx);
    const auto poles = integrand.poles();

    // Bottom edge at height t0 placed in the widest gap between pole heights.
    std::vector<double> heights;
    for (const auto &p : poles) {
        const double t = lattice_coordinates(ctx, p).second;
        heights.push_back(t - std::floor(t));
    }
    std::sort(heights.begin(), heights.end());
    double t0 = 0.5;
    double gap = 1.0;
    if (!heights.empty()) {
        gap = 0.0;
        for (std::size_t i = 0; i < heights.size(); ++i) {
            const double lo = heights[i];
            const double hi = i + 1 < heights.size() ? heights[i + 1] : heights.front() + 1.0;
            if (hi - lo > gap) {
                gap = hi - lo;
                t0 = lo + 0.5 * gap;
            }
        }
    }
    if (0.5 * gap * ctx.im_tau() < 0.05) {
        throw error(errc::pole_on_boundary, "no edge placement keeps poles 0.05 away from the boundary");
    }

    // F is 1-periodic along the edge, so the trapezoid rule converges geometrically.
    auto edge = [&](int n) {
        std::vector<cplx> vals(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            vals[static_cast<std::size_t>(k)] = integrand(t0 * ctx.tau() + static_cast<double>(k) / n);
        }
        return detail::pairwise_sum(vals.data(), vals.size()) / static_cast<double>(n);
    };
    const cplx edge_value = edge(512);
    const cplx edge_check = edge(256);
    if (std::abs(edge_value - edge_check) > 1e-9 * std::max(1.0, std::abs(edge_value))) {
        throw error(errc::non_convergence, "boundary quadrature did not settle");
    }

    // res of F (u(p) - w/(taubar - tau)) with u(p) the height of p inside the window.
    // A tiny circle loses digits to cancellation at high pole order, so the radius is as
    // large as the nearest other singularity allows.
    double radius = std::min({0.25, 0.4 * std::abs(ctx.tau()), 0.4});
    for (std::size_t i = 0; i < poles.size(); ++i) {
        for (std::size_t j = i + 1; j < poles.size(); ++j) {
            radius = std::min(radius, 0.4 * lattice_distance(ctx, poles[i] - poles[j]));
        }
    }
    const int nodes = 128;
    const cplx dtau = std::conj(ctx.tau()) - ctx.tau();
    cplx residues = 0.0;
    for (const auto &p : poles) {
        double t = lattice_coordinates(ctx, p).second;
        t -= std::floor(t - t0);
        const cplx up = t;
        std::vector<cplx> vals(static_cast<std::size_t>(nodes));
        for (int k = 0; k < nodes; ++k) {
            const cplx w = std::polar(radius, 2.0 * pi * k / nodes);
            vals[static_cast<std::size_t>(k)] = integrand(p + w) * (up - w / dtau) * w;
        }
        // (1 / 2 pi i) oint g dw with dw = i w dtheta.
        residues += detail::pairwise_sum(vals.data(), vals.size()) / static_cast<double>(nodes);
    }
    return 2.0 * pi * detail::I * residues + edge_value;
}

struct verdict
{
    bool pass = false;
    double rel_dev = 0.0;
    cplx engine;
    cplx oracle;
};

/// Relative deviation |engine - oracle| / max(1, |oracle|) against rel_tol.
inline verdict compare(cplx engine, const pv_report &oracle, double rel_tol)
{
    verdict v;
    v.engine = engine;
    v.oracle = oracle.value;
    v.rel_dev = std::abs(engine - oracle.value) / std::max(1.0, std::abs(oracle.value));
    v.pass = oracle.converged && v.rel_dev < rel_tol;
    return v;
}

} // namespace ellreg
