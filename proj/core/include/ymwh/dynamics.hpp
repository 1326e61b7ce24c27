#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ymwh/chebyshev.hpp"
#include "ymwh/evolution.hpp"
#include "ymwh/fitting.hpp"
#include "ymwh/params.hpp"
#include "ymwh/static_solver.hpp"

namespace ymwh {

/// A static solution represented by its Chebyshev series at some order.
struct CatalogueEntry {
    std::string label;
    ChebSeries series;
    double energy = 0.0;
};

/// W_0, -W_0, W_* and +-W_n for every nonconstant static solution at this
/// coupling, each as a series of order N.
std::vector<CatalogueEntry> static_catalogue(PhysParams params, std::size_t N, const StaticOptions& options = {});

struct Endstate {
    /// Label of the closest static solution, or "undecided".
    std::string label = "undecided";
    /// L^2([-1, 1]) distance to it.
    double distance = 0.0;
    /// Kinetic energy of the classified state.
    double kinetic = 0.0;
    bool decided() const { return label != "undecided"; }
};

/// Closest catalogue entry in the L^2 norm; "undecided" when none is within
/// tol.
Endstate classify_endstate(const EvolState& state, const std::vector<CatalogueEntry>& catalogue, double tol);

/// Classifies the final state of the trajectory.
Endstate classify_endstate(const Trajectory& trajectory, const std::vector<CatalogueEntry>& catalogue, double tol);

/// L^2 distance between every recorded sample and `target`. Requires that
/// all coefficients were recorded.
std::vector<double> distance_series(const Trajectory& trajectory, const ChebSeries& target);

/// One-parameter family of initial data c -> state at order N.
struct Family {
    std::string name;
    Parity parity = Parity::even;
    std::function<EvolState(double c, std::size_t N, PhysParams params)> make;
};

/// W(0, x) = -1 + c T_2(x) at rest.
Family even_c_family();
/// W(0, x) = c T_2(x) at rest; c = 0 is W_* itself.
Family symmetric_even_family();
/// W(0, x) = c T_1(x) + T_3(x) at rest.
Family odd_c_family();
/// Rest data with the given coefficient map, scaled by c.
Family scaled_family(std::string name, std::vector<std::pair<std::size_t, double>> coefficients);

/// Smallest energy of a nonconstant static solution or of W_*. A run whose
/// energy has dropped below it can no longer visit any static solution
/// other than +-W_0.
double lowest_static_energy(PhysParams params, const StaticOptions& options = {});

struct BisectConfig {
    /// Evolution settings of each probe; stop and recorded quantities are
    /// overridden inside the loop. The stride is kept: sample times clip the
    /// adaptive steps, and the final bracket pair must be integrated with
    /// exactly the step sequence its probes had.
    EvolConfig evol;
    /// A probe is decided once its energy is below the lowest static energy
    /// and |a_0| exceeds this value; the endstate sign is that of a_0.
    double sign_threshold = 0.5;
    /// Lowest static energy; computed from the static solutions when unset.
    std::optional<double> energy_barrier;
    /// Probes still undecided at this time raise ResolutionError.
    double tau_max = 600.0;
    int max_halvings = 48;
    /// Extra time recorded after the final bracket pair has settled.
    double tail_time = 40.0;
    bool run_final_pair = true;
};

struct Probe {
    double c = 0.0;
    int sign = 0;
    double decided_at = 0.0;
};

struct CriticalResult {
    std::string family;
    PhysParams params{1.0};
    double c_lo = 0.0;
    double c_hi = 0.0;
    int sign_lo = 0;
    int sign_hi = 0;
    int halvings = 0;
    std::vector<Probe> probes;
    /// Intermediate attractor of the final pair and the smallest L^2
    /// distance reached.
    std::string intermediate = "undecided";
    double intermediate_distance = 0.0;
    /// Full-resolution evolutions from c_lo and c_hi.
    std::optional<Trajectory> run_lo;
    std::optional<Trajectory> run_hi;
    /// Measured lifetimes, filled in by lifetime_scaling.
    std::vector<std::pair<double, double>> lifetimes;

    double c_star() const { return 0.5 * (c_lo + c_hi); }
};

/// Sign (+1 or -1) of a_0 when the run from the given state settles onto
/// +W_0 or -W_0, and the time at which that was detected.
Probe endstate_sign(const Family& family, double c, PhysParams params, const BisectConfig& config);

/// Bisects c in [c_lo, c_hi] on the endstate sign until the bracket width is
/// below 10^-digits relative to c (or max_halvings is reached). Throws
/// NotSeparatingError when both ends reach the same sign.
CriticalResult bisect_critical(const Family& family, PhysParams params, double c_lo, double c_hi, int digits,
                               const BisectConfig& config = {});

/// Candidate intermediate attractors for a family: W_* and +-W_2 (even) or
/// W_* and +-W_3 (odd), where they exist.
std::vector<CatalogueEntry> intermediate_candidates(Parity parity, PhysParams params, std::size_t N);

/// Candidate with the smallest distance reached along the trajectory.
std::pair<std::string, double> closest_approach(const Trajectory& trajectory,
                                                const std::vector<CatalogueEntry>& candidates);

struct ScalingResult {
    double slope = 0.0;
    double intercept = 0.0;
    double predicted = 0.0;
    /// Samples as (|c - c_*|, lifetime).
    std::vector<std::pair<double, double>> samples;
};

/// Least-squares slope of lifetime against -ln(offset).
ScalingResult fit_lifetime_scaling(const std::vector<std::pair<double, double>>& samples, double gamma);

/// Time spent within L^2 distance delta of the attractor, for evolutions
/// from c_star + offset. Offsets must span at least three decades in
/// |offset|. Throws ScalingUndefinedError when a run never enters the
/// neighbourhood.
ScalingResult lifetime_scaling(const Family& family, PhysParams params, double c_star,
                               const std::vector<double>& offsets, const ChebSeries& attractor, double gamma,
                               double delta = 0.05, const BisectConfig& config = {});

/// Rates of the three phases of a near-critical run: approach to the
/// intermediate attractor (decaying distance), escape along its unstable
/// mode (exponential growth) and the final ringdown to +-W_0.
struct PhaseAnalysis {
    /// Exponential decay of the L^2 distance to the attractor.
    FitResult approach;
    /// Damped oscillation of dW/dtau on the approach window, when it has
    /// enough sign changes.
    std::optional<FitResult> approach_oscillation;
    FitResult escape;
    FitResult ringdown;
    double closest_time = 0.0;
    double closest_distance = 0.0;
    double exit_time = 0.0;
    int final_sign = 0;
};

struct PhaseOptions {
    /// Observation point of the field signals.
    double x = 0.0;
    /// The approach phase starts once the distance stays below
    /// enter_distance and ends approach_margin before the closest point.
    double enter_distance = 0.1;
    double approach_margin = 2.0;
    /// The escape phase ends when the distance reaches this value.
    double exit_distance = 0.05;
    double ringdown_width = 12.0;
};

/// Fits the three phases of a run that came close to `attractor`. The
/// escape fit's rate is minus the growth rate. With `partner`, the run from
/// the other end of a critical bracket, the escape is fitted on the
/// difference of the two runs, in which the common approach cancels.
PhaseAnalysis three_phase_analysis(const Trajectory& trajectory, const ChebSeries& attractor,
                                   const PhaseOptions& options = {}, const Trajectory* partner = nullptr);

struct ConvergenceRow {
    std::size_t N = 0;
    /// Squared L^2 distance at the comparison time to the reference run.
    double l2_squared = 0.0;
};

/// Evolves the same data at each order and compares with order N_ref at
/// time tau.
std::vector<ConvergenceRow> convergence_experiment(const EvolState& initial, const std::vector<std::size_t>& orders,
                                                   std::size_t N_ref = 50, double tau = 1.0, double rtol = 1e-13);

}  // namespace ymwh
