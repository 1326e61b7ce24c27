#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "test_support.hpp"
#include "ymwh/chebyshev.hpp"
#include "ymwh/errors.hpp"

using namespace ymwh;

namespace {

double max_diff(const ChebSeries& a, const ChebSeries& b)
{
    double d = 0.0;
    const std::size_t n = std::max(a.order(), b.order());
    for (std::size_t k = 0; k <= n; ++k) {
        const auto i = static_cast<std::ptrdiff_t>(k);
        d = std::max(d, std::abs(a[i] - b[i]));
    }
    return d;
}

}  // namespace

TEST(ChebSeries, OutOfRangeIndicesReadAsZero)
{
    const ChebSeries s(std::vector<double>{1.0, 2.0, 3.0});
    EXPECT_EQ(s.order(), 2u);
    EXPECT_EQ(s[-1], 0.0);
    EXPECT_EQ(s[3], 0.0);
    EXPECT_EQ(s[2], 3.0);
}

TEST(ChebSeries, ResizedPadsAndTruncates)
{
    const ChebSeries s(std::vector<double>{1.0, 2.0, 3.0});
    EXPECT_EQ(s.resized(5).order(), 5u);
    EXPECT_EQ(s.resized(5)[4], 0.0);
    EXPECT_EQ(s.resized(1), ChebSeries(std::vector<double>{1.0, 2.0}));
}

TEST(ChebSeries, TailRatioLooksAtTheLastTwoEntries)
{
    EXPECT_EQ(ChebSeries(4).tail_ratio(), 0.0);
    EXPECT_DOUBLE_EQ(ChebSeries(std::vector<double>{2.0, 0.0, 0.0, 0.5, 0.0}).tail_ratio(), 0.25);
    EXPECT_DOUBLE_EQ(ChebSeries::unit(3, 6, -4.0).max_abs(), 4.0);
}

TEST(ChebSeries, ArithmeticMatchesPointwise)
{
    std::mt19937_64 rng(test::seed());
    const ChebSeries a = test::random_series(rng, 7);
    const ChebSeries b = test::random_series(rng, 4);
    for (double x : {-1.0, -0.3, 0.2, 1.0}) {
        EXPECT_NEAR(eval_series(a + b, x), eval_series(a, x) + eval_series(b, x), 1e-13);
        EXPECT_NEAR(eval_series(a - b, x), eval_series(a, x) - eval_series(b, x), 1e-13);
        EXPECT_NEAR(eval_series(2.5 * a, x), 2.5 * eval_series(a, x), 1e-13);
    }
}

TEST(ChebSeries, ClenshawMatchesTrigonometricDefinition)
{
    std::mt19937_64 rng(test::seed() + 1);
    std::uniform_real_distribution<double> ux(-1.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const ChebSeries s = test::random_series(rng, 1 + trial % 30);
        const double x = ux(rng);
        EXPECT_NEAR(eval_series(s, x), test::direct_value(s, x), 1e-12);
    }
}

TEST(ChebSeries, EndpointValues)
{
    std::mt19937_64 rng(test::seed() + 2);
    const ChebSeries s = test::random_series(rng, 9);
    EXPECT_NEAR(eval_right(s.coeffs()), eval_series(s, 1.0), 1e-13);
    EXPECT_NEAR(eval_left(s.coeffs()), eval_series(s, -1.0), 1e-13);
}

TEST(ChebSeries, EvaluationOutsideTheIntervalIsRejected)
{
    EXPECT_THROW(eval_series(ChebSeries(3), 1.5), DomainError);
    EXPECT_THROW(eval_series(ChebSeries(3), std::nan("")), DomainError);
}

TEST(ChebProduct, MatchesPointwiseProduct)
{
    std::mt19937_64 rng(test::seed() + 3);
    for (int trial = 0; trial < 100; ++trial) {
        const ChebSeries u = test::random_series(rng, trial % 11);
        const ChebSeries v = test::random_series(rng, (trial * 7) % 13);
        const ChebSeries p = cheb_product(u, v);
        EXPECT_EQ(p.order(), u.order() + v.order());
        for (double x : {-0.9, -0.1, 0.4, 0.75}) {
            EXPECT_NEAR(eval_series(p, x), eval_series(u, x) * eval_series(v, x), 1e-12);
        }
    }
}

TEST(NonlinearW, EqualsTripleProductOnRandomSeries)
{
    std::mt19937_64 rng(test::seed() + 4);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const ChebSeries a = test::random_series(rng, trial % 11);
        const ChebSeries oracle = cheb_product(cheb_product(a, a), a);
        worst = std::max(worst, max_diff(nonlinear_w(a), oracle));
    }
    EXPECT_LT(worst, 1e-12);
}

TEST(NonlinearW, TruncatedOrderAgreesWithFullExpansion)
{
    std::mt19937_64 rng(test::seed() + 5);
    const ChebSeries a = test::random_series(rng, 12);
    const ChebSeries full = nonlinear_w(a);
    const ChebSeries cut = nonlinear_w(a, 12);
    ASSERT_EQ(cut.order(), 12u);
    for (std::ptrdiff_t n = 0; n <= 12; ++n) EXPECT_NEAR(cut[n], full[n], 1e-13);

    std::vector<double> out(13);
    nonlinear_w_into(a.coeffs(), out);
    for (std::size_t n = 0; n <= 12; ++n) EXPECT_NEAR(out[n], full[static_cast<std::ptrdiff_t>(n)], 1e-13);
}

TEST(XDerivZ, EqualsSampledDifferentiation)
{
    // x W'(x) sampled at Lobatto nodes from the analytic T_n' and transformed
    // back to coefficients.
    std::mt19937_64 rng(test::seed() + 6);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t order = trial % 11;
        const ChebSeries a = test::random_series(rng, order);
        const std::size_t M = std::max<std::size_t>(order, 1);
        const auto nodes = lobatto_nodes(M);
        std::vector<double> values;
        for (double x : nodes) values.push_back(x * test::direct_derivative(a, x));
        const ChebSeries oracle = from_lobatto_values(values);
        worst = std::max(worst, max_diff(x_deriv_z(a), oracle));
    }
    EXPECT_LT(worst, 1e-12);
}

TEST(XDerivZ, SpanKernelAgrees)
{
    std::mt19937_64 rng(test::seed() + 7);
    const ChebSeries a = test::random_series(rng, 20);
    std::vector<double> out(21);
    x_deriv_z_into(a.coeffs(), out);
    const ChebSeries z = x_deriv_z(a);
    for (std::size_t n = 0; n <= 20; ++n) EXPECT_NEAR(out[n], z[static_cast<std::ptrdiff_t>(n)], 1e-12);
}

TEST(ChebDerivative, MatchesAnalyticDerivative)
{
    std::mt19937_64 rng(test::seed() + 8);
    for (int trial = 0; trial < 50; ++trial) {
        const ChebSeries a = test::random_series(rng, 1 + trial % 15);
        const ChebSeries d = cheb_derivative(a);
        for (double x : {-0.95, -0.2, 0.33, 0.9}) EXPECT_NEAR(eval_series(d, x), test::direct_derivative(a, x), 1e-10);
    }
    EXPECT_EQ(cheb_derivative(ChebSeries(std::vector<double>{3.0})).order(), 0u);
}

TEST(Lobatto, ValuesRoundTrip)
{
    std::mt19937_64 rng(test::seed() + 9);
    const ChebSeries a = test::random_series(rng, 16);
    std::vector<double> values;
    for (double x : lobatto_nodes(16)) values.push_back(eval_series(a, x));
    EXPECT_LT(max_diff(from_lobatto_values(values), a), 1e-13);
    const auto nodes = lobatto_nodes(4);
    EXPECT_DOUBLE_EQ(nodes.front(), 1.0);
    EXPECT_DOUBLE_EQ(nodes.back(), -1.0);
}

TEST(Monomial, ConversionMatchesPowers)
{
    const std::vector<double> mono{0.5, -1.0, 0.0, 2.0};  // 0.5 - x + 2 x^3
    const ChebSeries s = from_monomial(mono);
    for (double x : {-0.7, 0.0, 0.6}) EXPECT_NEAR(eval_series(s, x), 0.5 - x + 2 * x * x * x, 1e-14);
}

TEST(GaussLegendre, ExactForPolynomialsOfDegree2nMinus1)
{
    for (std::size_t n : {1u, 3u, 8u, 25u}) {
        const QuadratureRule q = gauss_legendre(n);
        for (std::size_t k = 0; k <= 2 * n - 1; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += q.weights[i] * std::pow(q.nodes[i], static_cast<double>(k));
            const double exact = (k % 2 == 0) ? 2.0 / static_cast<double>(k + 1) : 0.0;
            EXPECT_NEAR(s, exact, 1e-13) << "n=" << n << " k=" << k;
        }
    }
}

TEST(L2Distance, MatchesCompositeSimpson)
{
    std::mt19937_64 rng(test::seed() + 10);
    const ChebSeries u = test::random_series(rng, 9);
    const ChebSeries v = test::random_series(rng, 5);
    const int m = 20000;
    double s = 0.0;
    for (int i = 0; i <= m; ++i) {
        const double x = -1.0 + 2.0 * i / m;
        const double d = eval_series(u, x) - eval_series(v, x);
        const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        s += w * d * d;
    }
    s *= 2.0 / m / 3.0;
    EXPECT_NEAR(l2_distance_squared(u, v), s, 1e-9 * std::max(1.0, s));
    EXPECT_EQ(l2_distance_squared(u, u), 0.0);
    // ||T_0||^2 = 2 on [-1, 1]
    EXPECT_NEAR(l2_distance_squared(ChebSeries::unit(0, 3), ChebSeries(3)), 2.0, 1e-14);
}
