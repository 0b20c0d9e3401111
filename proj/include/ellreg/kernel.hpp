#pragma once

// Elliptic-function kernel on the torus C/(Z + Z tau).
//
// Conventions:
//   theta     the odd Jacobi theta function, theta(z) = 2 sum_{n>=0} (-1)^n e^{i pi tau (n+1/2)^2} sin((2n+1) pi z),
//             so theta'(0) = 2 pi eta(tau)^3.
//   zeta      theta'/theta + eta1 z, with eta1 = 2 zeta(1/2) = (pi^2/3) E2.
//   wp        -zeta', the Weierstrass function of the lattice Z + Z tau.
//   Zhat      d/dz log(theta(z) exp(-2 pi (im z)^2 / im tau)); doubly periodic, odd, not meromorphic.
//   G_{2k}    (1/2) sum'_{(m,n)} (m tau + n)^{-2k} (Eisenstein summation order for k = 1).
//   eta1hat   eta1 - pi / im tau.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "ellreg/error.hpp"

namespace ellreg
{

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr int default_jet_cap = 24;
inline constexpr int max_jet_cap = 60;
/// Distance below which an argument counts as sitting on a lattice point.
inline constexpr double pole_threshold = 1e-8;

namespace detail
{

inline constexpr cplx I{0.0, 1.0};

// Coefficient tables for d^j/dz^j csc^2(pi z) written as polynomials in c = cot(pi z):
// P_0 = 1 + c^2 and P_{j+1}(c) = -pi (1 + c^2) P_j'(c).
inline const std::vector<std::vector<double>> &csc2_cot_polys()
{
    static const std::vector<std::vector<double>> table = [] {
        std::vector<std::vector<double>> polys;
        polys.push_back({1.0, 0.0, 1.0});
        for (int j = 0; j < max_jet_cap + 4; ++j) {
            const auto &p = polys.back();
            std::vector<double> dp(p.size() > 1 ? p.size() - 1 : 1, 0.0);
            for (std::size_t k = 1; k < p.size(); ++k) {
                dp[k - 1] = static_cast<double>(k) * p[k];
            }
            std::vector<double> next(dp.size() + 2, 0.0);
            for (std::size_t k = 0; k < dp.size(); ++k) {
                next[k] += -pi * dp[k];
                next[k + 2] += -pi * dp[k];
            }
            polys.push_back(std::move(next));
        }
        return polys;
    }();
    return table;
}

inline cplx horner(const std::vector<double> &p, cplx x)
{
    cplx acc = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) {
        acc = acc * x + *it;
    }
    return acc;
}

inline double factorial(int n)
{
    double f = 1.0;
    for (int k = 2; k <= n; ++k) {
        f *= k;
    }
    return f;
}

// Decides when a series whose k-th term is bounded by k^power e^{-decay k} can stop.
class tail_monitor
{
    public:
        tail_monitor(double power, double decay) : m_power(power), m_decay(decay) {}
        bool negligible(int k)
        {
            const double log_bound = m_power * std::log(static_cast<double>(k)) - m_decay * k;
            m_log_max = std::max(m_log_max, log_bound);
            const bool past_peak = m_decay * k > m_power;
            return past_peak && log_bound < m_log_max - 41.5; // ~ 1e-18 relative
        }

    private:
        double m_power;
        double m_decay;
        double m_log_max = -std::numeric_limits<double>::infinity();
};

inline constexpr int series_hard_cap = 200000;

} // namespace detail

/// Smallest number of q-series terms with |q|^N below 1e-16.
inline int default_series_cutoff(cplx tau)
{
    if (!(tau.imag() > 0.0)) {
        throw error(errc::non_positive_imaginary_part, "im(tau) must be positive");
    }
    const double per_term = 2.0 * pi * tau.imag(); // -log|q|
    return std::max(8, static_cast<int>(std::ceil(16.0 * std::log(10.0) / per_term)) + 2);
}

/// A lattice-reduced point: z = reduced + m + n tau with integer m, n.
struct reduced_point
{
    cplx reduced;
    double m = 0.0;
    double n = 0.0;
};

/// A finite jet: coefficient of w^{lead_exponent + i} is coeffs[i], up to w^order.
struct jet
{
    cplx center;
    int order = 0;
    int lead_exponent = 0;
    std::vector<cplx> coeffs;

    cplx coefficient(int k) const
    {
        if (k < lead_exponent || k > order) {
            return 0.0;
        }
        return coeffs[static_cast<std::size_t>(k - lead_exponent)];
    }
};

/// Fixed tau with its cached q-series constants. Immutable after construction.
class modular_context
{
    public:
        modular_context(cplx tau, int series_cutoff, int jet_cap = default_jet_cap)
            : m_tau(tau), m_series_cutoff(series_cutoff), m_jet_cap(jet_cap)
        {
            if (!(tau.imag() > 0.0)) {
                throw error(errc::non_positive_imaginary_part, "im(tau) must be positive");
            }
            if (jet_cap < 1 || jet_cap > max_jet_cap) {
                throw error(errc::invalid_argument, "jet_cap must lie in [1, " + std::to_string(max_jet_cap) + "]");
            }
            m_q = std::exp(2.0 * pi * detail::I * tau);
            if (series_cutoff < 1 || std::pow(std::abs(m_q), series_cutoff) > 1e-14) {
                throw error(errc::cutoff_too_small, "|q|^cutoff exceeds 1e-14 for cutoff " + std::to_string(series_cutoff));
            }
            compute_constants();
        }

        cplx tau() const { return m_tau; }
        cplx q() const { return m_q; }
        double im_tau() const { return m_tau.imag(); }
        int series_cutoff() const { return m_series_cutoff; }
        int jet_cap() const { return m_jet_cap; }

        cplx e2() const { return m_e2; }
        cplx e4() const { return m_e4; }
        cplx e6() const { return m_e6; }
        cplx g4() const { return eisenstein(4); }
        cplx g6() const { return eisenstein(6); }
        cplx g2() const { return 60.0 * 2.0 * g4(); }
        cplx g3() const { return 140.0 * 2.0 * g6(); }
        cplx eta1() const { return m_eta1; }
        cplx eta1hat() const { return m_eta1hat; }
        cplx eta2() const { return m_tau * m_eta1 - 2.0 * pi * detail::I; }
        double pi_over_imtau() const { return pi / m_tau.imag(); }

        /// G_{weight}, weight even and >= 2. G_2 is the holomorphic (Eisenstein-ordered) value eta1/2.
        cplx eisenstein(int weight) const
        {
            if (weight < 2 || weight % 2 != 0) {
                throw error(errc::invalid_argument, "Eisenstein weight must be even and >= 2");
            }
            const auto k = static_cast<std::size_t>(weight / 2);
            if (k >= m_eisenstein.size()) {
                throw error(errc::jet_cap_exceeded, "Eisenstein weight " + std::to_string(weight) + " beyond table");
            }
            return m_eisenstein[k];
        }

        /// Named constants in a fixed order, for reporting.
        std::vector<std::pair<std::string, cplx>> constants() const
        {
            return {{"E2", m_e2},           {"E4", m_e4},   {"E6", m_e6},     {"G4", g4()},
                    {"G6", g6()},           {"g2", g2()},   {"g3", g3()},     {"eta1", m_eta1},
                    {"eta1hat", m_eta1hat}, {"pi_over_imtau", cplx(pi_over_imtau(), 0.0)}};
        }

    private:
        void compute_constants()
        {
            cplx s1 = 0.0, s3 = 0.0, s5 = 0.0;
            cplx qn = 1.0;
            for (int n = 1; n <= m_series_cutoff; ++n) {
                qn *= m_q;
                const cplx lambert = qn / (1.0 - qn);
                const double dn = n;
                s1 += dn * lambert;
                s3 += dn * dn * dn * lambert;
                s5 += dn * dn * dn * dn * dn * lambert;
            }
            m_e2 = 1.0 - 24.0 * s1;
            m_e4 = 1.0 + 240.0 * s3;
            m_e6 = 1.0 - 504.0 * s5;
            m_eta1 = pi * pi / 3.0 * m_e2;
            m_eta1hat = m_eta1 - pi_over_imtau();

            // wp(w) = w^-2 + sum_{n>=1} c_n w^{2n}, c_n = (2n+1) 2 G_{2n+2}.
            const int top = m_jet_cap + 12;
            std::vector<cplx> c(static_cast<std::size_t>(top) + 1, 0.0);
            c[1] = 6.0 * (std::pow(pi, 4) / 90.0) * m_e4;
            c[2] = 10.0 * (std::pow(pi, 6) / 945.0) * m_e6;
            for (int n = 3; n <= top; ++n) {
                cplx acc = 0.0;
                for (int m = 1; m <= n - 2; ++m) {
                    acc += c[static_cast<std::size_t>(m)] * c[static_cast<std::size_t>(n - 1 - m)];
                }
                c[static_cast<std::size_t>(n)] = 3.0 / ((2.0 * n + 3.0) * (n - 2.0)) * acc;
            }
            m_eisenstein.assign(static_cast<std::size_t>(top) + 2, 0.0);
            m_eisenstein[1] = m_eta1 / 2.0;
            for (int n = 1; n <= top; ++n) {
                m_eisenstein[static_cast<std::size_t>(n + 1)] = c[static_cast<std::size_t>(n)] / (2.0 * (2.0 * n + 1.0));
            }
        }

        cplx m_tau;
        cplx m_q;
        int m_series_cutoff;
        int m_jet_cap;
        cplx m_e2, m_e4, m_e6, m_eta1, m_eta1hat;
        std::vector<cplx> m_eisenstein; // index k holds G_{2k}
};

inline modular_context new_context(cplx tau, int series_cutoff, int jet_cap = default_jet_cap)
{
    return modular_context(tau, series_cutoff, jet_cap);
}

/// Lattice coordinates (s, t) with z = s + t tau.
inline std::pair<double, double> lattice_coordinates(const modular_context &ctx, cplx z)
{
    const double t = z.imag() / ctx.im_tau();
    const double s = z.real() - t * ctx.tau().real();
    return {s, t};
}

/// Representative with both lattice coordinates in [-1/2, 1/2).
inline reduced_point reduce_centered(const modular_context &ctx, cplx z)
{
    const auto [s, t] = lattice_coordinates(ctx, z);
    const double m = std::floor(s + 0.5);
    const double n = std::floor(t + 0.5);
    return {z - m - n * ctx.tau(), m, n};
}

/// Representative z - m - n tau with lattice coordinates in [0,1) x [0,1).
inline cplx reduce_to_fundamental(const modular_context &ctx, cplx z)
{
    auto frac = [](double x) {
        double f = x - std::floor(x);
        if (f >= 1.0 - 1e-14 || f < 1e-14) {
            f = 0.0;
        }
        return f;
    };
    const auto [s, t] = lattice_coordinates(ctx, z);
    return frac(s) + frac(t) * ctx.tau();
}

/// Flat distance from z to the nearest lattice point.
inline double lattice_distance(const modular_context &ctx, cplx z)
{
    const cplx r = reduce_centered(ctx, z).reduced;
    double best = std::numeric_limits<double>::infinity();
    for (int i = -1; i <= 1; ++i) {
        for (int j = -1; j <= 1; ++j) {
            best = std::min(best, std::abs(r - static_cast<double>(i) - static_cast<double>(j) * ctx.tau()));
        }
    }
    return best;
}

namespace detail
{

inline void require_off_lattice(const modular_context &ctx, cplx z)
{
    if (lattice_distance(ctx, z) < pole_threshold) {
        throw error(errc::pole_at_lattice_point, "argument reduces to a lattice point");
    }
}

inline void require_within_cap(const modular_context &ctx, int order)
{
    if (order < 0) {
        throw error(errc::invalid_argument, "negative jet order");
    }
    if (order > ctx.jet_cap()) {
        throw error(errc::jet_cap_exceeded,
                    "order " + std::to_string(order) + " exceeds jet cap " + std::to_string(ctx.jet_cap()));
    }
}

// j-th derivatives (j = 0..m) of pi^2 csc^2(pi z) for a centered z.
inline std::vector<cplx> csc2_row(cplx z, int m)
{
    std::vector<cplx> out(static_cast<std::size_t>(m) + 1, 0.0);
    const double im = z.imag();
    if (std::abs(im) < 0.15) {
        const cplx c = std::cos(pi * z) / std::sin(pi * z);
        const auto &polys = csc2_cot_polys();
        for (int j = 0; j <= m; ++j) {
            out[static_cast<std::size_t>(j)] = pi * pi * horner(polys[static_cast<std::size_t>(j)], c);
        }
        return out;
    }
    // pi^2 csc^2(pi z) = -4 pi^2 sum_k k e^{+-2 pi i k z}, sign chosen by the half plane.
    const double sgn = im > 0.0 ? 1.0 : -1.0;
    const cplx step = std::exp(sgn * 2.0 * pi * I * z);
    cplx e = 1.0;
    tail_monitor tail(m + 1.0, 2.0 * pi * std::abs(im));
    for (int k = 1; k < series_hard_cap; ++k) {
        e *= step;
        const cplx freq = sgn * 2.0 * pi * I * static_cast<double>(k);
        cplx f = 1.0;
        for (int j = 0; j <= m; ++j) {
            out[static_cast<std::size_t>(j)] += -4.0 * pi * pi * static_cast<double>(k) * f * e;
            f *= freq;
        }
        if (tail.negligible(k)) {
            break;
        }
    }
    return out;
}

} // namespace detail

/// [wp(u), wp'(u), ..., wp^{(m)}(u)].
inline std::vector<cplx> wp_jet(const modular_context &ctx, cplx u, int m)
{
    detail::require_within_cap(ctx, m);
    detail::require_off_lattice(ctx, u);
    const cplx z = reduce_centered(ctx, u).reduced;
    std::vector<cplx> out = detail::csc2_row(z, m);

    // Rows m tau, m != 0, summed in Lambert form.
    const cplx q = ctx.q();
    const cplx up = std::exp(2.0 * pi * detail::I * z);
    const cplx down = std::exp(-2.0 * pi * detail::I * z);
    cplx qk = 1.0, ek_up = 1.0, ek_down = 1.0;
    detail::tail_monitor tail(m + 1.0, 2.0 * pi * (ctx.im_tau() - std::abs(z.imag())));
    for (int k = 1; k < detail::series_hard_cap; ++k) {
        qk *= q;
        ek_up *= up;
        ek_down *= down;
        const cplx lambert = qk / (1.0 - qk);
        const cplx freq = 2.0 * pi * detail::I * static_cast<double>(k);
        cplx f_up = 1.0, f_down = 1.0;
        const cplx weight = -4.0 * pi * pi * static_cast<double>(k) * lambert;
        for (int j = 0; j <= m; ++j) {
            out[static_cast<std::size_t>(j)] += weight * (f_up * ek_up + f_down * ek_down);
            f_up *= freq;
            f_down *= -freq;
        }
        if (tail.negligible(k)) {
            break;
        }
    }
    out[0] -= ctx.eta1();
    return out;
}

/// theta'/theta at a point with |im z| < im tau (no reduction applied).
inline cplx log_theta_derivative(const modular_context &ctx, cplx z)
{
    if (std::abs(z.imag()) >= ctx.im_tau()) {
        throw error(errc::invalid_argument, "theta'/theta series requires |im z| < im tau");
    }
    detail::require_off_lattice(ctx, z);
    cplx acc = pi * std::cos(pi * z) / std::sin(pi * z);
    const cplx q = ctx.q();
    cplx qk = 1.0;
    detail::tail_monitor tail(0.0, 2.0 * pi * (ctx.im_tau() - std::abs(z.imag())));
    for (int k = 1; k < detail::series_hard_cap; ++k) {
        qk *= q;
        acc += 4.0 * pi * qk / (1.0 - qk) * std::sin(2.0 * pi * static_cast<double>(k) * z);
        if (tail.negligible(k)) {
            break;
        }
    }
    return acc;
}

/// Weierstrass zeta, quasi-periodic: zeta(z + 1) = zeta(z) + eta1, zeta(z + tau) = zeta(z) + eta2.
inline cplx weierstrass_zeta(const modular_context &ctx, cplx z)
{
    const auto r = reduce_centered(ctx, z);
    return log_theta_derivative(ctx, r.reduced) + ctx.eta1() * r.reduced + r.m * ctx.eta1() + r.n * ctx.eta2();
}

inline cplx zhat_value(const modular_context &ctx, cplx z)
{
    const cplx r = reduce_centered(ctx, z).reduced;
    return log_theta_derivative(ctx, r) + 2.0 * pi * detail::I * r.imag() / ctx.im_tau();
}

/// Taylor coefficients theta^{(k)}(z)/k!, k = 0..order.
inline jet theta_jet(const modular_context &ctx, cplx z, int order)
{
    detail::require_within_cap(ctx, order);
    std::vector<cplx> coeffs(static_cast<std::size_t>(order) + 1, 0.0);
    const cplx tau = ctx.tau();
    double log_max = -std::numeric_limits<double>::infinity();
    double log_prev = log_max;
    for (int n = 0; n < detail::series_hard_cap; ++n) {
        const double h = n + 0.5;
        const cplx nome = std::exp(pi * detail::I * tau * h * h);
        const double freq = (2.0 * n + 1.0) * pi;
        const double sign = n % 2 == 0 ? 1.0 : -1.0;
        double f = 1.0;
        for (int k = 0; k <= order; ++k) {
            coeffs[static_cast<std::size_t>(k)] += 2.0 * sign * nome * f * std::sin(freq * z + k * pi / 2.0);
            f *= freq;
        }
        const double log_bound = -pi * ctx.im_tau() * h * h + order * std::log(freq) + freq * std::abs(z.imag());
        log_max = std::max(log_max, log_bound);
        if (log_bound < log_prev && log_bound < log_max - 41.5) {
            break;
        }
        log_prev = log_bound;
    }
    for (int k = 0; k <= order; ++k) {
        coeffs[static_cast<std::size_t>(k)] /= detail::factorial(k);
    }
    return {z, order, 0, std::move(coeffs)};
}

/// Holomorphic jet of Zhat at z. The constant term is the true value; at a lattice point the
/// Laurent jet 1/w - eta1hat w - sum_{k>=2} 2 G_{2k} w^{2k-1} is returned (lead exponent -1).
/// The wbar-linear part is not represented.
inline jet zhat_holo_jet(const modular_context &ctx, cplx z, int order)
{
    detail::require_within_cap(ctx, order);
    if (lattice_distance(ctx, z) < pole_threshold) {
        std::vector<cplx> coeffs(static_cast<std::size_t>(order + 2), 0.0);
        coeffs[0] = 1.0;
        for (int e = 1; e <= order; e += 2) {
            const cplx c = e == 1 ? -ctx.eta1hat() : -2.0 * ctx.eisenstein(e + 1);
            coeffs[static_cast<std::size_t>(e + 1)] = c;
        }
        return {z, order, -1, std::move(coeffs)};
    }
    std::vector<cplx> coeffs(static_cast<std::size_t>(order) + 1, 0.0);
    coeffs[0] = zhat_value(ctx, z);
    if (order >= 1) {
        const auto wp = wp_jet(ctx, z, std::max(0, order - 1));
        coeffs[1] = -(wp[0] + ctx.eta1hat());
        for (int j = 2; j <= order; ++j) {
            coeffs[static_cast<std::size_t>(j)] = -wp[static_cast<std::size_t>(j - 1)] / detail::factorial(j);
        }
    }
    return {z, order, 0, std::move(coeffs)};
}

} // namespace ellreg
