#include <gtest/gtest.h>

#include <random>

#include "ellreg/expr.hpp"
#include "ellreg/parser.hpp"
#include "ellreg/suites.hpp"

using namespace ellreg;

namespace
{

modular_context ctx_at(cplx tau)
{
    return new_context(tau, default_series_cutoff(tau));
}

double rel(cplx a, cplx b)
{
    return std::abs(a - b) / std::max(1.0, std::abs(b));
}

atom zhat_atom(int a, int b)
{
    return {atom_kind::zhat, 0, a, b};
}

} // namespace

TEST(Parse, TriangleIsOneTermThreeAtoms)
{
    const expr e = parse("wp(1-2)*wp(2-3)*wp(3-1)");
    ASSERT_EQ(e.size(), 1u);
    const auto &[atoms, c] = *e.terms().begin();
    EXPECT_EQ(atoms.size(), 3u);
    // wp is even, so reorienting wp(3-1) keeps the coefficient.
    EXPECT_EQ(c, cplx(1.0));
    EXPECT_EQ(e.points(), (std::set<int>{1, 2, 3}));
}

TEST(Parse, ParityNormalizationOfZhat)
{
    const expr e = parse("Z(2-1)");
    ASSERT_EQ(e.size(), 1u);
    const auto &[atoms, c] = *e.terms().begin();
    ASSERT_EQ(atoms.size(), 1u);
    EXPECT_EQ(atoms[0], zhat_atom(1, 2));
    EXPECT_EQ(c, cplx(-1.0));
}

TEST(Parse, ConstantsResolveAtEvaluation)
{
    const expr e = parse("wp(1-2)^2 - (1/12)*g2");
    EXPECT_EQ(e.size(), 2u);
    const auto ctx = ctx_at({0.0, 2.0});
    const cplx u{0.3, 0.7};
    const cplx w = wp_jet(ctx, u, 0)[0];
    EXPECT_LT(rel(evaluate(e, ctx, {{1, u}, {2, 0.0}}), w * w - ctx.g2() / 12.0), 1e-13);
}

TEST(Atoms, OddDerivativesFlipSign)
{
    EXPECT_EQ(expr::wp(1, 2, 1), -expr::wp(1, 1, 2));
    EXPECT_EQ(expr::wp(2, 2, 1), expr::wp(2, 1, 2));
    EXPECT_EQ(expr::zhat(3, 1), -expr::zhat(1, 3));
    EXPECT_THROW(expr::wp(0, 2, 2), error);
    EXPECT_THROW(expr::zhat(4, 4), error);
}

TEST(Atoms, ParityNormalizationPreservesValues)
{
    const auto ctx = ctx_at({0.3, 1.7});
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const auto assign = checks::random_assignment(rng, ctx, 3);
        for (int m = 0; m < 4; ++m) {
            // Direct value of wp^{(m)}(z_2 - z_1) against the normalized atom.
            const cplx direct = wp_jet(ctx, assign.at(2) - assign.at(1), m)[static_cast<std::size_t>(m)];
            EXPECT_LT(rel(evaluate(expr::wp(m, 2, 1), ctx, assign), direct), 1e-10);
        }
        const cplx direct = zhat_value(ctx, assign.at(3) - assign.at(2));
        EXPECT_LT(rel(evaluate(expr::zhat(3, 2), ctx, assign), direct), 1e-10);
    }
}

TEST(Terms, LikeTermsMergeAndCancel)
{
    expr e = parse("wp(1-2)*Z(1-3) + Z(1-3)*wp(2-1)");
    ASSERT_EQ(e.size(), 1u);
    EXPECT_EQ(e.terms().begin()->second, cplx(2.0));
    EXPECT_TRUE(parse("Z(1-2) + Z(2-1)").is_zero());
    EXPECT_TRUE((parse("wp'(1-2)") + parse("wp'(2-1)")).is_zero());
    EXPECT_EQ(parse("wp(1-2) - wp(1-2)"), expr());
}

TEST(Evaluate, HalfPeriodRootsSumToZero)
{
    const auto ctx = ctx_at({0.0, 2.0});
    const expr e = parse("wp(1-2)");
    const cplx tau = ctx.tau();
    const cplx e1 = evaluate(e, ctx, {{1, 0.5}, {2, 0.0}});
    const cplx e2 = evaluate(e, ctx, {{1, tau / 2.0}, {2, 0.0}});
    const cplx e3 = evaluate(e, ctx, {{1, (1.0 + tau) / 2.0}, {2, 0.0}});
    EXPECT_LT(std::abs(e1 + e2 + e3), 1e-10 * std::abs(e1));
    EXPECT_LT(std::abs(e1.imag()), 1e-12);
    // e1 is a root of the cubic 4x^3 - g2 x - g3.
    EXPECT_LT(std::abs(4.0 * e1 * e1 * e1 - ctx.g2() * e1 - ctx.g3()), 1e-9 * std::abs(ctx.g3()));
}

TEST(Evaluate, ZhatVanishesAtHalfPeriod)
{
    for (const cplx tau : {cplx(0.0, 1.0), cplx(0.0, 2.0), cplx(0.3, 1.7)}) {
        const auto ctx = ctx_at(tau);
        EXPECT_LT(std::abs(evaluate(parse("Z(1-2)"), ctx, {{1, 0.75}, {2, 0.25}})), 1e-10);
    }
}

TEST(Evaluate, WeierstrassRelationExpression)
{
    const expr relation = parse("wp'(1-2)^2 - 4*wp(1-2)^3 + g2*wp(1-2) + g3");
    std::mt19937_64 rng(5);
    for (const cplx tau : {cplx(0.0, 1.0), cplx(0.0, 2.0), cplx(0.3, 1.7)}) {
        const auto ctx = ctx_at(tau);
        for (int trial = 0; trial < 40; ++trial) {
            const auto assign = checks::random_assignment(rng, ctx, 2);
            const cplx w = evaluate(parse("wp(1-2)"), ctx, assign);
            const double scale = std::max(1.0, 4.0 * std::pow(std::abs(w), 3));
            EXPECT_LT(std::abs(evaluate(relation, ctx, assign)) / scale, 1e-8);
        }
    }
}

TEST(Evaluate, PoleHitAndMissingPoint)
{
    const auto ctx = ctx_at({0.0, 1.0});
    const cplx tau = ctx.tau();
    try {
        evaluate(parse("wp(1-2)"), ctx, {{1, 0.2 + tau}, {2, 0.2}});
        FAIL();
    } catch (const error &e) {
        EXPECT_EQ(e.code(), errc::pole_hit);
        EXPECT_NE(std::string(e.what()).find("wp(1-2)"), std::string::npos);
    }
    EXPECT_THROW(evaluate(parse("Z(1-2)"), ctx, {{1, 0.2}}), error);
    EXPECT_EQ(evaluate(parse("3*pi"), ctx, {}), cplx(3.0 * pi));
}

TEST(Differentiate, ZhatRule)
{
    EXPECT_EQ(differentiate(parse("Z(1-2)"), 1), parse("-wp(1-2) - eta1h"));
    EXPECT_EQ(differentiate(parse("Z(1-2)"), 2), parse("wp(1-2) + eta1h"));
    EXPECT_EQ(differentiate(parse("wp(1-2)^2"), 1), parse("2*wp(1-2)*wp'(1-2)"));
    EXPECT_EQ(differentiate(parse("wp(1-2)"), 3), expr());
    EXPECT_EQ(differentiate(parse("wp''(2-1)"), 1), parse("wp'''(2-1)*(-1)"));
}

TEST(Differentiate, MatchesWirtingerFiniteDifferences)
{
    // The holomorphic derivative of an almost-elliptic expression is the Wirtinger d/dz;
    // Zhat's conj(z) part contributes nothing to it.
    std::mt19937_64 rng(21);
    const auto ctx = ctx_at({0.3, 1.7});
    checks::random_expr_options opts;
    opts.constants = true;
    opts.complex_coefficients = true;
    int checked = 0;
    while (checked < 50) {
        const expr e = checks::random_expr(rng, opts);
        const auto assign = checks::random_assignment(rng, ctx, opts.points, 0.25);
        const int p = 1 + static_cast<int>(rng() % static_cast<unsigned>(opts.points));
        const expr d = differentiate(e, p);
        const double h = 1e-5;
        auto at = [&](cplx shift) {
            auto moved = assign;
            moved[p] += shift;
            return evaluate(e, ctx, moved);
        };
        const cplx dx = (at(h) - at(-h)) / (2.0 * h);
        const cplx dy = (at(cplx(0.0, h)) - at(cplx(0.0, -h))) / (2.0 * h);
        const cplx wirtinger = 0.5 * (dx - detail::I * dy);
        const cplx exact = evaluate(d, ctx, assign);
        const double scale = std::max({1.0, std::abs(exact), std::abs(dx)});
        EXPECT_LT(std::abs(wirtinger - exact) / scale, 1e-4) << render_expr(e) << " in z_" << p;
        ++checked;
    }
}

TEST(PolesIn, Examples)
{
    using list = std::vector<std::pair<int, int>>;
    EXPECT_EQ(poles_in(parse("wp(1-2)*wp(2-3)"), 1), (list{{2, 2}}));
    EXPECT_EQ(poles_in(parse("wp(1-2)*wp(1-3)"), 1), (list{{2, 2}, {3, 2}}));
    EXPECT_EQ(poles_in(parse("wp'(1-2)*Z(1-2)"), 1), (list{{2, 4}}));
    EXPECT_EQ(poles_in(parse("wp(1-2)^2 + Z(1-2)"), 1), (list{{2, 4}}));
    EXPECT_TRUE(poles_in(parse("wp(2-3)"), 1).empty());
}

TEST(PolesIn, NeverUnderReports)
{
    std::mt19937_64 rng(8);
    const auto ctx = ctx_at({0.0, 1.0});
    checks::random_expr_options opts;
    for (int trial = 0; trial < 30; ++trial) {
        const expr e = checks::random_expr(rng, opts);
        const auto assign = checks::random_assignment(rng, ctx, opts.points, 0.3);
        for (const auto &[q, order] : poles_in(e, 1)) {
            const cplx dir = std::polar(1.0, 2.0 * pi * static_cast<double>(rng() % 1000) / 1000.0);
            double worst = 0.0;
            for (const double r : {1e-2, 1e-3, 1e-4}) {
                auto moved = assign;
                moved[1] = assign.at(q) + r * dir;
                worst = std::max(worst, std::abs(evaluate(e, ctx, moved)) * std::pow(r, order));
            }
            EXPECT_LT(worst, 1e4) << render_expr(e);
        }
    }
}

TEST(LaurentExpand, ZhatShiftedToAnotherPoint)
{
    const auto s = laurent_expand(parse("Z(1-3)"), 1, 2, 1);
    EXPECT_EQ(s.coefficient(0), parse("Z(2-3)"));
    EXPECT_EQ(s.coefficient(1), parse("-wp(2-3) - eta1h"));
}

TEST(LaurentExpand, WpAtItsPole)
{
    const auto s = laurent_expand(parse("wp(1-2)"), 1, 2, 4);
    EXPECT_EQ(s.lead_exponent(), -2);
    EXPECT_EQ(s.coefficient(-2), expr::scalar(1.0));
    EXPECT_TRUE(s.coefficient(-1).is_zero());
    EXPECT_TRUE(s.coefficient(0).is_zero());
    EXPECT_EQ(s.coefficient(2), expr::eisenstein(4) * cplx(6.0));
    EXPECT_EQ(s.coefficient(4), expr::eisenstein(6) * cplx(10.0));
    // The pole sits at w = z_1 - z_2; expanding around z_2 from the other side flips odd terms.
    const auto t = laurent_expand(parse("wp'(1-2)"), 2, 1, 1);
    EXPECT_EQ(t.coefficient(-3), expr::scalar(2.0));
}

TEST(LaurentExpand, ZhatAtItsPole)
{
    const auto s = laurent_expand(parse("Z(1-2)"), 1, 2, 5);
    EXPECT_EQ(s.coefficient(-1), expr::scalar(1.0));
    EXPECT_EQ(s.coefficient(1), -expr::constant(atom_kind::eta1hat));
    EXPECT_EQ(s.coefficient(3), expr::eisenstein(4) * cplx(-2.0));
    EXPECT_EQ(s.coefficient(5), expr::eisenstein(6) * cplx(-2.0));
}

TEST(LaurentExpand, TaylorAtRegularPoint)
{
    const auto s = laurent_expand(parse("wp(1-2)"), 1, 3, 1);
    EXPECT_EQ(s.coefficient(0), parse("wp(3-2)"));
    EXPECT_EQ(s.coefficient(1), parse("wp'(3-2)"));
    EXPECT_THROW((void)laurent_expand(parse("wp(1-2)"), 1, 1, 1), error);
}

TEST(LaurentExpand, JetCap)
{
    try {
        (void)laurent_expand(parse("wp(1-2)"), 1, 3, 30, 24);
        FAIL();
    } catch (const error &e) {
        EXPECT_EQ(e.code(), errc::jet_cap_exceeded);
    }
}

TEST(LaurentExpand, TruncationErrorScalesWithOrder)
{
    // Meromorphic expressions: the truncated series at w must match direct evaluation with error O(w^{order+1}).
    const auto ctx = ctx_at({0.0, 2.0});
    const expr e = parse("wp(1-2)*wp(1-3) + 2*wp(1-2)*wp'(3-2) + wp(1-3)^2");
    const assignment fixed{{2, cplx(0.11, 0.37)}, {3, cplx(0.52, 1.13)}};
    for (const int order : {0, 1, 2}) {
        const auto s = laurent_expand(e, 1, 2, order);
        auto error_at = [&](double w) {
            cplx approx = 0.0;
            for (int k = s.lead_exponent(); k <= order; ++k) {
                approx += evaluate(s.coefficient(k), ctx, fixed) * std::pow(cplx(w), k);
            }
            auto moved = fixed;
            moved[1] = fixed.at(2) + w;
            return std::abs(evaluate(e, ctx, moved) - approx);
        };
        const double big = error_at(1e-2);
        const double small = error_at(1e-3);
        const double ratio = big / small;
        EXPECT_GT(ratio, std::pow(10.0, order + 1) / 3.0) << "order " << order;
    }
}

TEST(Render, Examples)
{
    EXPECT_EQ(render_expr(parse("wp(1-2)*wp(2-3)")), "wp(1-2)*wp(2-3)");
    EXPECT_EQ(render_expr(parse("-eta1h*wp(2-3)")), "-eta1h*wp(2-3)");
    const std::string two = render_expr(parse("wp(1-2) - 3*Z(1-2)"));
    EXPECT_EQ(two.find("+ -"), std::string::npos);
    EXPECT_NE(two.find(" - 3*Z(1-2)"), std::string::npos);
    EXPECT_EQ(render_expr(parse("eta1h^2")), "eta1h^2");
    EXPECT_EQ(render_expr(expr()), "0");
    EXPECT_EQ(render_expr(parse("(0.5,-2)*G8")), "(0.5,-2)*G8");
}

TEST(Render, RoundTripsThroughParser)
{
    std::mt19937_64 rng(99);
    checks::random_expr_options opts;
    opts.constants = true;
    opts.complex_coefficients = true;
    for (int trial = 0; trial < 200; ++trial) {
        const expr e = checks::random_expr(rng, opts);
        EXPECT_EQ(parse(render_expr(e)), e) << render_expr(e);
    }
}

TEST(ExprSeries, WpTimesZhatResidue)
{
    // residue of wp * Zhat at their common pole is -eta1hat; residue of Zhat^2 / 2 is zero.
    const auto wp = laurent_expand(parse("wp(1-2)"), 1, 2, 1);
    const auto z = laurent_expand(parse("Z(1-2)"), 1, 2, 3);
    EXPECT_EQ((wp * z).residue(), -expr::constant(atom_kind::eta1hat));
    const auto z2 = laurent_expand(parse("Z(1-2)"), 1, 2, 1);
    EXPECT_TRUE(scale(expr::scalar(0.5), z2 * z2).residue().is_zero());
}
