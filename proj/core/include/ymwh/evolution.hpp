#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "ymwh/chebyshev.hpp"
#include "ymwh/galerkin.hpp"
#include "ymwh/params.hpp"

namespace ymwh {

enum class Stepping { adaptive, fixed_rk4 };

struct EvolConfig {
    /// Truncation order; the initial state is padded or cut to it.
    std::size_t N = 40;
    double tau_end = 60.0;

    Stepping stepping = Stepping::adaptive;
    double rtol = 1e-10;
    /// Absolute tolerance of the adaptive stepper. Exponential fits of
    /// coefficients that fall far below unity need a tiny value here.
    double atol = 1e-12;
    /// Fixed step for Stepping::fixed_rk4; 0 selects 0.5 / N^2. The step is
    /// shortened so that it divides the stride.
    double dt = 0.0;

    /// Spacing of recorded samples.
    double stride = 0.01;
    /// Points x in [-1, 1] where W and dW/dtau are recorded.
    std::vector<double> observation_points{-1.0, 0.0, 1.0};
    /// Coefficient indices to record; empty records all of 0..N.
    std::vector<std::size_t> coefficients;
    bool record_energy = true;
    /// Full-state checkpoints every this many time units; 0 disables them.
    double checkpoint_interval = 5.0;

    /// Called at every recorded sample. Returning true stops the run after
    /// that sample is stored.
    std::function<bool(const EvolState&)> stop;

    void validate(double tau_start) const;
};

struct Trajectory {
    PhysParams params{1.0};
    std::size_t N = 0;
    bool linearized = false;

    std::vector<double> times;

    std::vector<std::size_t> coefficient_index;
    /// coefficients[k][i] = a_{coefficient_index[i]}(times[k]).
    std::vector<std::vector<double>> coefficients;

    std::vector<double> observation_points;
    /// field[k][j] = W(times[k], observation_points[j]); field_dot likewise.
    std::vector<std::vector<double>> field;
    std::vector<std::vector<double>> field_dot;

    /// Empty when energies were not recorded.
    std::vector<double> energy;
    std::vector<double> flux_left;
    std::vector<double> flux_right;
    std::vector<double> kinetic;
    /// Integral of flux_left + flux_right from the start, carried as an
    /// extra component of the integrated system.
    std::vector<double> radiated;

    std::vector<EvolState> checkpoints;
    std::optional<EvolState> final_state;
    bool stopped_early = false;

    /// Time series of one recorded coefficient.
    std::vector<double> coefficient_series(std::size_t n) const;
    /// Time series of W at the j-th observation point.
    std::vector<double> field_series(std::size_t j) const;
    std::vector<double> field_dot_series(std::size_t j) const;
    /// Index of the observation point closest to x.
    std::size_t observation_index(double x) const;
};

/// Integrates the truncated coefficient system from `initial` to
/// config.tau_end. Throws StiffnessError on step-size collapse and
/// BlowupError on nonfinite coefficients.
Trajectory evolve(const EvolState& initial, const EvolConfig& config);

/// Integrates u'' = -A u - B u' for the pencil matrices of `background`.
/// The perturbation u is what gets recorded (coefficients and field values);
/// energies are not recorded.
Trajectory linearized_evolve(const ChebSeries& background, const EvolState& perturbation, const EvolConfig& config);

enum class BalanceMethod {
    /// Energy change against the flux integral carried by the integrator.
    integrated,
    /// Energy change against the trapezoid rule on the recorded fluxes.
    trapezoid,
};

/// max_k |E(t_{k+1}) - E(t_k) + integral of the fluxes over [t_k, t_{k+1}]|.
/// Zero for trajectories with fewer than two energy samples.
double energy_balance_residual(const Trajectory& trajectory, BalanceMethod method = BalanceMethod::integrated);

/// max_k (E(t_{k+1}) - E(t_k)), the largest energy increase between samples.
double max_energy_increase(const Trajectory& trajectory);

}  // namespace ymwh
