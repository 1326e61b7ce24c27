#include <gtest/gtest.h>

#include <cmath>

#include "ymwh/errors.hpp"
#include "ymwh/evolution.hpp"
#include "ymwh/spectra.hpp"
#include "ymwh/static_solver.hpp"

using namespace ymwh;

namespace {

EvolState data_2t1_t5(PhysParams p, std::size_t N)
{
    ChebSeries a(N);
    a.at(1) = 2.0;
    a.at(5) = 1.0;
    return EvolState::at_rest(a, N, p);
}

EvolConfig short_run(std::size_t N, double tau_end)
{
    EvolConfig c;
    c.N = N;
    c.tau_end = tau_end;
    c.stride = 0.05;
    c.checkpoint_interval = 0.0;
    return c;
}

}  // namespace

TEST(Evolve, ConstantsStayPut)
{
    for (double a0 : {0.0, 1.0, -1.0}) {
        const EvolState s = EvolState::at_rest(ChebSeries::unit(0, 12, a0), 12, PhysParams(3.5));
        const Trajectory t = evolve(s, short_run(12, 5.0));
        ASSERT_TRUE(t.final_state);
        EXPECT_EQ(t.final_state->a, s.a);
        EXPECT_EQ(t.final_state->a_dot.max_abs(), 0.0);
    }
}

TEST(Evolve, FirstStaticIsStationaryToTruncationAccuracy)
{
    const PhysParams p(3.5);
    const ChebSeries c = to_cheb(find_static(p, 1), 40);
    EvolConfig cfg = short_run(40, 2.0);
    const Trajectory t = evolve(EvolState::at_rest(c, 40, p), cfg);
    EXPECT_LT(std::sqrt(l2_distance_squared(t.final_state->a, c)), 1e-6);
}

TEST(Evolve, OddDataStaysOdd)
{
    const Trajectory t = evolve(data_2t1_t5(PhysParams(3.5), 20), short_run(20, 3.0));
    for (std::size_t n = 0; n <= 20; n += 2) EXPECT_EQ((*t.final_state).a[static_cast<std::ptrdiff_t>(n)], 0.0);
    // W(tau, 0) stays zero
    for (double v : t.field_series(t.observation_index(0.0))) EXPECT_EQ(v, 0.0);
}

TEST(Evolve, EnergyDecreasesAndBalancesTheFluxes)
{
    const Trajectory t = evolve(data_2t1_t5(PhysParams(3.5), 40), short_run(40, 10.0));
    ASSERT_EQ(t.energy.size(), t.times.size());
    EXPECT_LT(max_energy_increase(t), 1e-8);
    EXPECT_LT(energy_balance_residual(t), 1e-6);
    EXPECT_LT(t.energy.back(), t.energy.front());
    EXPECT_NEAR(t.energy.front() - t.energy.back(), t.radiated.back(), 1e-5 * t.energy.front());
}

TEST(Evolve, FixedStepAgreesWithAdaptive)
{
    const PhysParams p(1.5);
    ChebSeries a(16);
    a.at(0) = 0.3;
    a.at(2) = 0.4;
    const EvolState s = EvolState::at_rest(a, 16, p);
    EvolConfig adaptive = short_run(16, 2.0);
    adaptive.rtol = 1e-12;
    EvolConfig fixed = adaptive;
    fixed.stepping = Stepping::fixed_rk4;
    fixed.dt = 1e-3;
    const Trajectory ta = evolve(s, adaptive);
    const Trajectory tf = evolve(s, fixed);
    EXPECT_LT(std::sqrt(l2_distance_squared(ta.final_state->a, tf.final_state->a)), 1e-8);
}

TEST(Evolve, SmallPerturbationsFollowTheLinearizedEquation)
{
    const PhysParams p(2.5);
    const std::size_t N = 20;
    const double eps = 1e-6;
    ChebSeries u(N);
    u.at(1) = 1.0;
    u.at(3) = -0.5;
    const ChebSeries bg = ChebSeries::unit(0, N);
    EvolConfig cfg = short_run(N, 3.0);
    cfg.rtol = 1e-12;
    cfg.atol = 1e-20;
    const Trajectory full = evolve(EvolState::at_rest(bg + eps * u, N, p), cfg);
    const Trajectory lin = linearized_evolve(bg, EvolState::at_rest(u, N, p), cfg);
    EXPECT_TRUE(lin.linearized);
    const ChebSeries diff = (1.0 / eps) * (full.final_state->a - bg);
    const double scale = std::sqrt(l2_distance_squared(lin.final_state->a, ChebSeries(0)));
    EXPECT_LT(std::sqrt(l2_distance_squared(diff, lin.final_state->a)), 1e-4 * scale);
}

TEST(Evolve, UnstableModeOfStarGrowsAtItsRate)
{
    // The j = 0 unstable mode of W_* is a constant growing like e^{l tau}.
    const PhysParams p(0.5);
    EvolConfig cfg = short_run(6, 4.0);
    cfg.rtol = 1e-12;
    cfg.atol = 1e-20;
    const Trajectory lin = linearized_evolve(ChebSeries(6), EvolState(ChebSeries::unit(0, 6), ChebSeries::unit(0, 6, 0.5), 0.0, p), cfg);
    EXPECT_NEAR(lin.final_state->a[0], std::exp(0.5 * 4.0), 1e-8 * std::exp(2.0));
}

TEST(Evolve, RestartFromCheckpointReproducesTheRun)
{
    const PhysParams p(3.5);
    EvolConfig cfg = short_run(20, 6.0);
    cfg.checkpoint_interval = 2.0;
    cfg.rtol = 1e-12;
    const Trajectory t = evolve(data_2t1_t5(p, 20), cfg);
    ASSERT_GE(t.checkpoints.size(), 3u);
    const EvolState& mid = t.checkpoints[1];
    EXPECT_NEAR(mid.tau, 2.0, 1e-9);
    const Trajectory resumed = evolve(mid, cfg);
    EXPECT_NEAR(resumed.times.front(), 2.0, 1e-9);
    EXPECT_LT(std::sqrt(l2_distance_squared(resumed.final_state->a, t.final_state->a)), 1e-8);
}

TEST(Evolve, StopPredicateEndsTheRunEarly)
{
    EvolConfig cfg = short_run(20, 10.0);
    cfg.stop = [](const EvolState& s) { return s.tau >= 1.0; };
    const Trajectory t = evolve(data_2t1_t5(PhysParams(3.5), 20), cfg);
    EXPECT_TRUE(t.stopped_early);
    EXPECT_NEAR(t.times.back(), 1.0, 1e-9);
    EXPECT_NEAR(t.final_state->tau, 1.0, 1e-9);
}

TEST(Evolve, RecordsOnlyTheRequestedSeries)
{
    EvolConfig cfg = short_run(10, 1.0);
    cfg.coefficients = {1, 3};
    cfg.observation_points = {0.5};
    cfg.record_energy = false;
    const Trajectory t = evolve(data_2t1_t5(PhysParams(3.5), 10), cfg);
    EXPECT_EQ(t.coefficient_index, (std::vector<std::size_t>{1, 3}));
    EXPECT_TRUE(t.energy.empty());
    EXPECT_EQ(energy_balance_residual(t), 0.0);
    EXPECT_EQ(t.coefficient_series(1).front(), 2.0);
    EXPECT_THROW(t.coefficient_series(2), PreconditionError);
    EXPECT_THROW(t.field_series(1), PreconditionError);
    EXPECT_THROW(t.field_dot_series(1), PreconditionError);
    EXPECT_EQ(t.observation_index(0.9), 0u);
}

TEST(EvolConfig, ValidationRejectsBadSettings)
{
    EvolConfig c;
    EXPECT_NO_THROW(c.validate(0.0));
    EXPECT_THROW(c.validate(c.tau_end), PreconditionError);
    auto expect_bad = [](auto mutate) {
        EvolConfig b;
        mutate(b);
        EXPECT_THROW(b.validate(0.0), PreconditionError);
    };
    expect_bad([](EvolConfig& b) { b.N = 0; });
    expect_bad([](EvolConfig& b) { b.stride = 0.0; });
    expect_bad([](EvolConfig& b) { b.rtol = -1.0; });
    expect_bad([](EvolConfig& b) { b.dt = -0.1; });
    expect_bad([](EvolConfig& b) { b.coefficients = {41}; });
    EvolConfig d;
    d.observation_points = {1.5};
    EXPECT_THROW(d.validate(0.0), DomainError);
}
