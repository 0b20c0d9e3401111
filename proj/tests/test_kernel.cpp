#include <gtest/gtest.h>

#include <random>

#include "ellreg/kernel.hpp"
#include "ellreg/lattice_sums.hpp"

using namespace ellreg;

namespace
{

modular_context ctx_at(cplx tau)
{
    return new_context(tau, default_series_cutoff(tau));
}

const cplx taus[] = {{0.0, 1.0}, {0.0, 2.0}, {0.3, 1.7}};

double rel(cplx a, cplx b)
{
    return std::abs(a - b) / std::max(1.0, std::abs(b));
}

std::vector<cplx> random_points(const modular_context &ctx, int n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<cplx> out;
    while (static_cast<int>(out.size()) < n) {
        const cplx z = u(rng) + u(rng) * ctx.tau();
        if (lattice_distance(ctx, z) > 0.05) {
            out.push_back(z);
        }
    }
    return out;
}

} // namespace

TEST(Context, RejectsBadInput)
{
    EXPECT_THROW(new_context({0.3, 0.0}, 10), error);
    EXPECT_THROW(new_context({0.3, -1.0}, 10), error);
    try {
        new_context({0.0, 1.0}, 2);
        FAIL();
    } catch (const error &e) {
        EXPECT_EQ(e.code(), errc::cutoff_too_small);
    }
    try {
        new_context({0.0, -1.0}, 10);
        FAIL();
    } catch (const error &e) {
        EXPECT_EQ(e.code(), errc::non_positive_imaginary_part);
    }
}

TEST(Context, SquareLatticeValues)
{
    const auto ctx = ctx_at({0.0, 1.0});
    EXPECT_LT(std::abs(ctx.e6()), 1e-12);
    EXPECT_NEAR(ctx.e2().real(), 3.0 / pi, 1e-14);
    EXPECT_NEAR(ctx.eta1().real(), pi, 1e-12);
    // eta1hat(i) = eta1(i) - pi / 1 vanishes.
    EXPECT_LT(std::abs(ctx.eta1hat()), 1e-12);
}

TEST(Context, ImaginaryTauGivesRealInvariants)
{
    const auto ctx = ctx_at({0.0, 2.0});
    EXPECT_LT(std::abs(ctx.g2().imag()), 1e-12);
    EXPECT_LT(std::abs(ctx.g3().imag()), 1e-12);
}

TEST(Context, StoredInvariantRelations)
{
    for (const cplx tau : taus) {
        const auto ctx = ctx_at(tau);
        EXPECT_EQ(ctx.g2(), 60.0 * 2.0 * ctx.g4());
        EXPECT_EQ(ctx.g3(), 140.0 * 2.0 * ctx.g6());
        EXPECT_EQ(ctx.eta1hat(), ctx.eta1() - pi / tau.imag());
        EXPECT_LT(rel(ctx.g4(), std::pow(pi, 4) / 90.0 * ctx.e4()), 1e-15);
        const auto consts = ctx.constants();
        ASSERT_EQ(consts.size(), 10u);
        EXPECT_EQ(consts.front().first, "E2");
        EXPECT_EQ(consts.back().first, "pi_over_imtau");
    }
}

TEST(Context, EisensteinAgainstLatticeSums)
{
    for (const cplx tau : taus) {
        const auto ctx = ctx_at(tau);
        EXPECT_LT(rel(ctx.g4(), lattice_eisenstein(tau, 4)), 1e-8);
        EXPECT_LT(rel(ctx.g6(), lattice_eisenstein(tau, 6)), 1e-8);
        EXPECT_LT(rel(ctx.eisenstein(8), lattice_eisenstein(tau, 8)), 1e-8);
        EXPECT_LT(rel(ctx.eisenstein(10), lattice_eisenstein(tau, 10)), 1e-8);
        const auto [eta1, eta1hat] = lattice_eta1(tau);
        EXPECT_LT(rel(ctx.eta1(), eta1), 1e-8);
        EXPECT_LT(rel(ctx.eta1hat(), eta1hat), 1e-8);
    }
}

TEST(Context, EisensteinMatchesZetaTimesE)
{
    const auto ctx = ctx_at({0.3, 1.7});
    const double zeta4 = std::pow(pi, 4) / 90.0;
    const double zeta6 = std::pow(pi, 6) / 945.0;
    EXPECT_LT(rel(ctx.g4(), zeta4 * ctx.e4()), 1e-14);
    EXPECT_LT(rel(ctx.g6(), zeta6 * ctx.e6()), 1e-14);
}

TEST(Reduction, FundamentalDomain)
{
    const auto ctx = ctx_at({0.3, 1.7});
    const cplx tau = ctx.tau();
    EXPECT_LT(std::abs(reduce_to_fundamental(ctx, 1.0 + tau)), 1e-14);
    EXPECT_LT(std::abs(reduce_to_fundamental(ctx, 0.5) - 0.5), 1e-14);
    EXPECT_LT(std::abs(reduce_to_fundamental(ctx, -0.25 + 1.75 * tau) - (0.75 + 0.75 * tau)), 1e-14);
}

TEST(WpJet, HalfPeriods)
{
    for (const cplx tau : taus) {
        const auto ctx = ctx_at(tau);
        const auto j1 = wp_jet(ctx, 0.5, 1);
        EXPECT_LT(std::abs(j1[1]), 1e-10);
        const cplx e1 = j1[0];
        const cplx e2 = wp_jet(ctx, tau / 2.0, 0)[0];
        const cplx e3 = wp_jet(ctx, (1.0 + tau) / 2.0, 0)[0];
        EXPECT_LT(std::abs(e1 + e2 + e3), 1e-10 * std::max(1.0, std::abs(e1)));
    }
}

TEST(WpJet, WeierstrassRelations)
{
    for (const cplx tau : taus) {
        const auto ctx = ctx_at(tau);
        for (const cplx z : random_points(ctx, 100, 3)) {
            const auto j = wp_jet(ctx, z, 2);
            const cplx cubic = 4.0 * j[0] * j[0] * j[0] - ctx.g2() * j[0] - ctx.g3();
            EXPECT_LT(std::abs(j[1] * j[1] - cubic) / std::max(1.0, std::abs(cubic)), 1e-8);
            const cplx second = 6.0 * j[0] * j[0] - ctx.g2() / 2.0;
            EXPECT_LT(std::abs(j[2] - second) / std::max(1.0, std::abs(second)), 1e-8);
        }
    }
    const auto ctx = ctx_at({0.0, 2.0});
    const auto j = wp_jet(ctx, {0.29, 0.31}, 1);
    const cplx cubic = 4.0 * j[0] * j[0] * j[0] - ctx.g2() * j[0] - ctx.g3();
    EXPECT_LT(std::abs(j[1] * j[1] - cubic) / std::abs(cubic), 1e-9);
}

TEST(WpJet, Periodicity)
{
    for (const cplx tau : taus) {
        const auto ctx = ctx_at(tau);
        for (const cplx z : random_points(ctx, 100, 4)) {
            const cplx v = wp_jet(ctx, z, 0)[0];
            for (const cplx w : {cplx(1.0), tau, -tau + 2.0}) {
                EXPECT_LT(std::abs(wp_jet(ctx, z + w, 0)[0] - v), 1e-9 * (1.0 + std::abs(v)));
            }
        }
    }
}

TEST(WpJet, HigherDerivativesMatchFiniteDifferences)
{
    const auto ctx = ctx_at({0.3, 1.7});
    const cplx z{0.31, 0.42};
    const auto j = wp_jet(ctx, z, 6);
    const double h = 1e-4;
    for (int m = 0; m < 6; ++m) {
        const cplx fd = (wp_jet(ctx, z + h, m)[static_cast<std::size_t>(m)] -
                         wp_jet(ctx, z - h, m)[static_cast<std::size_t>(m)]) /
                        (2.0 * h);
        EXPECT_LT(std::abs(fd - j[static_cast<std::size_t>(m + 1)]) / std::abs(j[static_cast<std::size_t>(m + 1)]),
                  1e-6);
    }
}

TEST(WpJet, PoleAndCapErrors)
{
    const auto ctx = new_context({0.0, 1.0}, 12, 8);
    try {
        wp_jet(ctx, 1.0 + ctx.tau(), 0);
        FAIL();
    } catch (const error &e) {
        EXPECT_EQ(e.code(), errc::pole_at_lattice_point);
    }
    try {
        wp_jet(ctx, 0.3, 9);
        FAIL();
    } catch (const error &e) {
        EXPECT_EQ(e.code(), errc::jet_cap_exceeded);
    }
}

TEST(Zhat, ClosedFormMatchesZetaDefinition)
{
    for (const cplx tau : taus) {
        const auto ctx = ctx_at(tau);
        for (const cplx z : random_points(ctx, 30, 5)) {
            const cplx via_zeta = weierstrass_zeta(ctx, z) - ctx.eta1hat() * z - ctx.pi_over_imtau() * std::conj(z);
            EXPECT_LT(rel(zhat_value(ctx, z), via_zeta), 1e-10);
        }
    }
}

TEST(Zhat, HalfPeriodPeriodicityOddness)
{
    for (const cplx tau : taus) {
        const auto ctx = ctx_at(tau);
        EXPECT_LT(std::abs(zhat_value(ctx, 0.5)), 1e-10);
        for (const cplx z : random_points(ctx, 100, 6)) {
            const cplx v = zhat_value(ctx, z);
            EXPECT_LT(std::abs(zhat_value(ctx, z + 1.0) - v), 1e-9);
            EXPECT_LT(std::abs(zhat_value(ctx, z + tau) - v), 1e-9);
            EXPECT_LT(std::abs(zhat_value(ctx, -z) + v), 1e-10);
        }
    }
}

TEST(Zeta, HalfPeriodPinsEta1)
{
    for (const cplx tau : taus) {
        const auto ctx = ctx_at(tau);
        EXPECT_LT(rel(weierstrass_zeta(ctx, 0.5), ctx.eta1() / 2.0), 1e-12);
        const cplx z{0.17, 0.23};
        EXPECT_LT(rel(weierstrass_zeta(ctx, z + 1.0) - weierstrass_zeta(ctx, z), ctx.eta1()), 1e-10);
        EXPECT_LT(rel(weierstrass_zeta(ctx, z + tau) - weierstrass_zeta(ctx, z), ctx.eta2()), 1e-10);
    }
}

TEST(ThetaJet, OddAndCritical)
{
    const auto ctx = ctx_at({0.3, 1.7});
    const auto at0 = theta_jet(ctx, 0.0, 3);
    EXPECT_LT(std::abs(at0.coefficient(0)), 1e-15);
    EXPECT_LT(std::abs(at0.coefficient(2)), 1e-13);
    const auto half = theta_jet(ctx, 0.5, 3);
    EXPECT_LT(std::abs(half.coefficient(1)), 1e-13);
    EXPECT_LT(std::abs(half.coefficient(3)), 1e-12);
}

TEST(ThetaJet, FiniteDifferences)
{
    const auto ctx = ctx_at({0.0, 1.0});
    const cplx z{0.3, 0.4};
    const auto j = theta_jet(ctx, z, 6);
    auto theta = [&](cplx x) { return theta_jet(ctx, x, 0).coefficient(0); };
    const double h = 1e-4;
    const cplx d1 = (theta(z + h) - theta(z - h)) / (2.0 * h);
    const cplx d2 = (theta(z + h) - 2.0 * theta(z) + theta(z - h)) / (h * h);
    EXPECT_LT(std::abs(d1 - j.coefficient(1)) / std::abs(j.coefficient(1)), 1e-5);
    EXPECT_LT(std::abs(d2 / 2.0 - j.coefficient(2)) / std::abs(j.coefficient(2)), 1e-5);
    // Higher orders: differentiate the lower-order jet numerically.
    for (int k = 3; k <= 6; ++k) {
        const cplx fd = (theta_jet(ctx, z + h, k - 1).coefficient(k - 1) - theta_jet(ctx, z - h, k - 1).coefficient(k - 1)) /
                        (2.0 * h) / static_cast<double>(k);
        EXPECT_LT(std::abs(fd - j.coefficient(k)) / std::abs(j.coefficient(k)), 1e-5) << "order " << k;
    }
}

TEST(ThetaJet, LogDerivativeAndNormalization)
{
    const auto ctx = ctx_at({0.3, 1.7});
    const cplx z{0.21, 0.35};
    const auto j = theta_jet(ctx, z, 1);
    EXPECT_LT(rel(j.coefficient(1) / j.coefficient(0), log_theta_derivative(ctx, z)), 1e-12);
    // theta'(0) = 2 pi eta(tau)^3 with Dedekind eta.
    cplx eta = std::exp(pi * detail::I * ctx.tau() / 12.0);
    for (int n = 1; n < 60; ++n) {
        eta *= 1.0 - std::pow(ctx.q(), n);
    }
    EXPECT_LT(rel(theta_jet(ctx, 0.0, 1).coefficient(1), 2.0 * pi * eta * eta * eta), 1e-12);
}

TEST(ZhatJet, LaurentAtOrigin)
{
    for (const cplx tau : taus) {
        const auto ctx = ctx_at(tau);
        const auto j = zhat_holo_jet(ctx, 0.0, 3);
        EXPECT_EQ(j.lead_exponent, -1);
        EXPECT_EQ(j.coefficient(-1), cplx(1.0));
        EXPECT_EQ(j.coefficient(1), -ctx.eta1hat());
        EXPECT_LT(rel(j.coefficient(3), -2.0 * ctx.g4()), 1e-14);
        EXPECT_EQ(j.coefficient(0), cplx(0.0));
        EXPECT_EQ(j.coefficient(2), cplx(0.0));
    }
}

TEST(ZhatJet, MatchesRaysAtRegularPoint)
{
    // Zhat(z + w) + (pi / Im tau) wbar is holomorphic in w; its Taylor coefficients are the jet.
    for (const cplx tau : taus) {
        const auto ctx = ctx_at(tau);
        const cplx z{0.27, 0.38};
        const auto j = zhat_holo_jet(ctx, z, 4);
        auto f = [&](cplx w) { return zhat_value(ctx, z + w) + ctx.pi_over_imtau() * std::conj(w); };
        for (const double angle : {0.0, 1.1, 2.3, 4.0}) {
            const cplx dir = std::polar(1.0, angle);
            const double h = 2e-2;
            // Cauchy integral over a small circle reproduces the coefficient independent of direction.
            for (int k = 0; k <= 4; ++k) {
                const int n = 64;
                cplx acc = 0.0;
                for (int s = 0; s < n; ++s) {
                    const cplx w = h * dir * std::polar(1.0, 2.0 * pi * s / n);
                    acc += f(w) / std::pow(w, k);
                }
                const cplx coeff = acc / static_cast<double>(n);
                EXPECT_LT(std::abs(coeff - j.coefficient(k)) / std::max(1.0, std::abs(j.coefficient(k))), 1e-5)
                    << "order " << k;
            }
            // And a one-sided difference quotient along the ray.
            const double t = 1e-6;
            const cplx slope = (f(t * dir) - f(-t * dir)) / (2.0 * t * dir);
            EXPECT_LT(std::abs(slope - j.coefficient(1)) / std::max(1.0, std::abs(j.coefficient(1))), 1e-5);
        }
    }
}

TEST(ZhatJet, EvenJetAtZeroHasNoOddPart)
{
    const auto ctx = ctx_at({0.0, 2.0});
    const auto j = wp_jet(ctx, 0.5, 5);
    // wp is even about the half period: odd derivatives vanish there.
    EXPECT_LT(std::abs(j[1]), 1e-10);
    EXPECT_LT(std::abs(j[3]), 1e-8);
    EXPECT_LT(std::abs(j[5]), 1e-6);
}
