#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ymwh/chebyshev.hpp"
#include "ymwh/params.hpp"

namespace ymwh {

/// Numerical controls for the static problem W'' + l(l+1) sech^2(r) W (1 - W^2) = 0.
struct StaticOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    /// Absolute tolerance used when sampling the final profile. It is tiny so
    /// that the exponentially small tail of W' is kept to relative accuracy
    /// (cosh(r) W'(r) is needed out to r_max).
    double profile_atol = 1e-24;
    double profile_rtol = 1e-12;
    double r_max = 25.0;
    double grid_step = 0.005;
    double bisect_width = 1e-13;
    int bisect_iterations = 400;
};

enum class ShotClass { crossed_plus_one, crossed_minus_one, confined };

std::string to_string(ShotClass c);

struct ShotOutcome {
    ShotClass classification = ShotClass::confined;
    int extrema_count = 0;
    std::optional<double> exit_radius;
};

/// Result of one shot: the classification and the dense samples of W, W'
/// at every accepted integrator step on [0, min(r_max, exit)].
struct ShotResult {
    ShotOutcome outcome;
    std::vector<double> r;
    std::vector<double> w;
    std::vector<double> w_prime;
};

/// Integrates the static ODE from r = 0 with (W, W') = (0, shoot) for odd
/// parity and (shoot, 0) for even parity, halting once |W| exceeds 1.
/// Throws BlowupError on a nonfinite state.
ShotResult integrate_static(PhysParams params, Parity parity, double shoot, double r_max,
                            const StaticOptions& options = {});

/// Number of zeros on (0, inf) the shot will have before leaving the strip
/// (or ever, if it stays confined), predicted from the state at the first
/// point where |W| > 1, Q > 0, or r = r_max. This is the bisection predicate
/// of the shooting construction.
int predicted_zero_count(PhysParams params, Parity parity, double shoot, const StaticOptions& options = {});

enum class StaticKind { ground, star, nonconstant };

/// Static solution sampled on a uniform grid over [-r_max, r_max].
struct StaticProfile {
    PhysParams params{1.0};
    StaticKind kind = StaticKind::nonconstant;
    Parity parity = Parity::even;
    int zero_count = 0;
    /// W'(0) for odd profiles, W(0) for even ones.
    double shoot = 0.0;
    std::vector<double> r;
    std::vector<double> w;
    std::vector<double> w_prime;
    /// 1 - |W| with full relative precision (W can sit closer to the vacuum
    /// than double precision resolves in W itself).
    std::vector<double> gap;
    /// Limit of W as r -> +inf (the r -> -inf limit follows from parity).
    double w_inf = 0.0;
    double energy = 0.0;
    StaticOptions options;
    /// Radius where the outward and inward halves were joined (0 for
    /// forward-only and constant profiles), the sign of W beyond it and
    /// log(1 - |W_inf|).
    double match_radius = 0.0;
    double tail_sign = 1.0;
    double tail_log_gap = 0.0;

    /// "W0", "W*" or "W<n>".
    std::string label() const;
    /// Pointwise negation, i.e. the profile obtained from the negated shoot.
    StaticProfile negated() const;
    bool is_constant() const noexcept { return kind != StaticKind::nonconstant; }
    /// min over the grid of 1 - |W|; positive iff the profile is strictly
    /// inside the strip |W| < 1.
    double min_gap() const;
};

StaticProfile ground_profile(PhysParams params, const StaticOptions& options = {});
StaticProfile star_profile(PhysParams params, const StaticOptions& options = {});

/// Samples the forward solution with the given shoot on the uniform grid and
/// reflects it to the full line. No tail correction is applied.
StaticProfile profile_from_shoot(PhysParams params, Parity parity, double shoot, const StaticOptions& options = {});

/// Regular static solution with exactly n zeros (n >= 1, n < ell), by
/// bisection of the shooting parameter. `upper` optionally overrides the
/// upper bracket end (the previous same-parity solution's shoot).
///
/// Forward shots near a regular solution drift away from it in the tail, so
/// the bisected shoot is polished by matching an outward solution from r = 0
/// to an inward one started on the asymptotic family W_inf + O(e^{-2r}) at
/// r_max; the returned profile is stitched from the two halves.
StaticProfile find_static(PhysParams params, int n, const StaticOptions& options = {},
                          std::optional<double> upper = std::nullopt);

/// W_0, W_* and every W_n with 1 <= n < ell. Rejects integer ell.
std::vector<StaticProfile> enumerate_statics(PhysParams params, const StaticOptions& options = {});

/// Energy by quadrature of the static functional, cross-checked against
/// the virial form; throws InconsistencyError if the two disagree.
double static_energy(const StaticProfile& profile);

struct EnergyForms {
    double direct = 0.0;
    double virial = 0.0;
};

/// Both quadratures behind static_energy, without the consistency check.
EnergyForms static_energy_forms(const StaticProfile& profile);

struct IdentityResiduals {
    double virial = 0.0;
    double odd_identity = 0.0;
    int q_monotonicity_violations = 0;
};

IdentityResiduals identity_residuals(const StaticProfile& profile);

/// The Q functional cosh^2(r) W'^2 - (l(l+1)/2)(1 - W^2)^2 on the profile grid.
std::vector<double> q_functional(const StaticProfile& profile);

struct LegendreLimit {
    int zero_count = 0;
    std::vector<double> r;
    std::vector<double> w;
    std::vector<double> w_prime;
};

/// Solution of w'' + l(l+1) sech^2(r) w = 0, w(0) = 0, w'(0) = 1 on
/// [0, r_max] and its number of zeros in (0, r_max].
LegendreLimit legendre_limit(PhysParams params, double r_max);

/// Values W(r) at the given nonnegative radii (sorted ascending) for the
/// solution with the given shoot, integrated directly to each radius.
std::vector<double> static_values(PhysParams params, Parity parity, double shoot, const std::vector<double>& radii,
                                  const StaticOptions& options = {});

/// W at the given nonnegative radii (any order) by direct integration of the
/// same outward/inward halves the profile was built from.
std::vector<double> profile_values(const StaticProfile& profile, const std::vector<double>& radii);

/// Chebyshev coefficients in x = tanh r from the M+1 Gauss-Lobatto values.
/// Wrong-parity coefficients are set to zero; emits a warning when the tail
/// exceeds 1e-8 of the largest coefficient.
ChebSeries to_cheb(const StaticProfile& profile, std::size_t M);

/// Sign changes of a sampled function, refining every interval with the
/// cubic Hermite interpolant built from (w, w') so grazing double zeros are
/// not missed.
int count_sign_changes(const std::vector<double>& r, const std::vector<double>& w, const std::vector<double>& w_prime);

/// Trapezoidal rule on a uniform grid (spectrally accurate for smooth
/// integrands that decay at both ends).
double trapezoid(const std::vector<double>& r, const std::vector<double>& f);

inline double sech2(double r)
{
    const double e = std::exp(-2.0 * std::abs(r));
    const double d = 1.0 + e;
    return 4.0 * e / (d * d);
}

}  // namespace ymwh
