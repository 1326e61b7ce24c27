#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "ymwh/errors.hpp"
#include "ymwh/galerkin.hpp"
#include "ymwh/spectra.hpp"
#include "ymwh/static_solver.hpp"

using namespace ymwh;

TEST(GalerkinRhs, FixedPointsAreExact)
{
    for (double ell : {0.1, 1.0, 3.5, 6.5}) {
        const PhysParams p(ell);
        for (std::size_t N = 1; N <= 50; ++N) {
            for (double a0 : {0.0, 1.0, -1.0}) {
                const EvolState s = EvolState::at_rest(ChebSeries::unit(0, N, a0), N, p);
                const ChebSeries r = rhs(s);
                for (std::size_t n = 0; n <= N; ++n) {
                    ASSERT_EQ(r[static_cast<std::ptrdiff_t>(n)], 0.0) << "ell=" << ell << " N=" << N << " a0=" << a0;
                }
            }
        }
    }
}

TEST(GalerkinRhs, LinearizationMatchesPencilMatrices)
{
    // The central difference of the nonlinear right-hand side about a
    // background equals -A u - B v, with A and B assembled independently
    // from multiplication matrices.
    std::mt19937_64 rng(test::seed() + 20);
    const std::size_t N = 16;
    const PhysParams p(2.5);
    for (int trial = 0; trial < 5; ++trial) {
        ChebSeries bg = test::random_series(rng, 4, 0.5);
        if (trial == 0) bg = ChebSeries(4);
        if (trial == 1) bg = ChebSeries::unit(0, 4);
        const PencilMatrices m = pencil_matrices(bg.resized(N), p, N);
        const ChebSeries u = test::random_series(rng, N, 0.3);
        const ChebSeries v = test::random_series(rng, N, 0.3);
        const double eps = 1e-4;
        const ChebSeries bgN = bg.resized(N);
        const ChebSeries plus = rhs(EvolState(bgN + eps * u, eps * v, 0.0, p));
        const ChebSeries minus = rhs(EvolState(bgN - eps * u, -eps * v, 0.0, p));
        Eigen::VectorXd ue(N + 1), ve(N + 1);
        for (std::size_t n = 0; n <= N; ++n) {
            ue[n] = u[static_cast<std::ptrdiff_t>(n)];
            ve[n] = v[static_cast<std::ptrdiff_t>(n)];
        }
        const Eigen::VectorXd lin = -m.A * ue - m.B * ve;
        for (std::size_t n = 0; n <= N; ++n) {
            const double fd = (plus[static_cast<std::ptrdiff_t>(n)] - minus[static_cast<std::ptrdiff_t>(n)]) / (2 * eps);
            EXPECT_NEAR(fd, lin[n], 1e-6 * (1.0 + std::abs(lin[n]))) << "trial " << trial << " n " << n;
        }
    }
}

TEST(GalerkinRhs, PreallocatedKernelAgreesWithFreeFunction)
{
    std::mt19937_64 rng(test::seed() + 21);
    const std::size_t N = 24;
    const PhysParams p(3.5);
    const ChebSeries a = test::random_series(rng, N, 0.5);
    const ChebSeries ad = test::random_series(rng, N, 0.5);
    GalerkinRhs k(N, p.coupling());
    EXPECT_EQ(k.order(), N);
    std::vector<double> out(N + 1);
    k(a.coeffs(), ad.coeffs(), out);
    const ChebSeries ref = rhs(EvolState(a, ad, 0.0, p));
    for (std::size_t n = 0; n <= N; ++n) EXPECT_DOUBLE_EQ(out[n], ref[static_cast<std::ptrdiff_t>(n)]);
    std::vector<double> short_out(N);
    EXPECT_THROW(k(a.coeffs(), ad.coeffs(), short_out), PreconditionError);
}

TEST(GalerkinRhs, OddDataKeepsOddParity)
{
    std::mt19937_64 rng(test::seed() + 22);
    const std::size_t N = 21;
    ChebSeries a = test::random_series(rng, N);
    ChebSeries ad = test::random_series(rng, N);
    for (std::size_t n = 0; n <= N; n += 2) a.at(n) = ad.at(n) = 0.0;
    const ChebSeries r = rhs(EvolState(a, ad, 0.0, PhysParams(1.5)));
    for (std::ptrdiff_t n = 0; n <= static_cast<std::ptrdiff_t>(N); n += 2) EXPECT_EQ(r[n], 0.0);
}

TEST(BondiEnergy, ConstantsHaveTheirStaticEnergies)
{
    for (double ell : {0.5, 3.5}) {
        const PhysParams p(ell);
        const BondiEnergy star = bondi_energy(EvolState::at_rest(ChebSeries(10), 10, p));
        EXPECT_NEAR(star.energy, 0.5 * p.coupling(), 1e-13);
        const BondiEnergy ground = bondi_energy(EvolState::at_rest(ChebSeries::unit(0, 10), 10, p));
        EXPECT_NEAR(ground.energy, 0.0, 1e-15);
        EXPECT_EQ(ground.flux_left + ground.flux_right + ground.kinetic, 0.0);
    }
}

TEST(BondiEnergy, StaticSolutionCarriesItsStaticEnergy)
{
    const PhysParams p(3.5);
    const StaticProfile w1 = find_static(p, 1);
    const ChebSeries c = to_cheb(w1, 80);
    const BondiEnergy e = bondi_energy(EvolState::at_rest(c, 80, p));
    EXPECT_NEAR(e.energy, w1.energy, 1e-7);
}

TEST(BondiEnergy, FluxesAreBoundaryVelocitiesSquared)
{
    std::mt19937_64 rng(test::seed() + 23);
    const ChebSeries a = test::random_series(rng, 8);
    const ChebSeries ad = test::random_series(rng, 8);
    const BondiEnergy e = bondi_energy(EvolState(a, ad, 0.0, PhysParams(1.5)));
    EXPECT_NEAR(e.flux_right, std::pow(eval_series(ad, 1.0), 2), 1e-12);
    EXPECT_NEAR(e.flux_left, std::pow(eval_series(ad, -1.0), 2), 1e-12);
    // kinetic part against the exact L^2 norm
    EXPECT_NEAR(e.kinetic, 0.5 * l2_distance_squared(ad, ChebSeries(0)), 1e-12);
    EXPECT_GE(e.energy, e.kinetic);
}
