#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>

namespace ymwh {

enum class FitModel { exponential, ringdown, powerlaw };

std::string to_string(FitModel m);

struct FitWindow {
    double lo = 0.0;
    double hi = 0.0;
};

/// Parameters of one asymptotic model fitted on a window:
///   exponential  y = A e^{-rate t}
///   ringdown     y = A e^{-rate t} sin(frequency t + phase)
///   powerlaw     y = A (t - origin)^{rate}, origin = 0 unless fitted
/// `residual` is the RMS misfit over the window divided by the RMS of the
/// data there.
struct FitResult {
    FitModel model = FitModel::exponential;
    double rate = 0.0;
    std::optional<double> frequency;
    double amplitude = 0.0;
    std::optional<double> phase;
    /// Time origin of a shifted power law.
    std::optional<double> origin;
    FitWindow window;
    double residual = 0.0;
    std::size_t samples = 0;

    double operator()(double t) const;
};

/// Least-squares line through (t, log y). Requires y > 0 on the window and
/// at least 10 samples (InsufficientDataError).
FitResult fit_exponential(std::span<const double> t, std::span<const double> y, FitWindow window);

/// Damped sinusoid: frequency from the extremum spacing, rate from the log
/// envelope of the extrema, then a Levenberg-Marquardt refinement of all
/// four parameters. Requires at least 4 sign changes on the window
/// (InsufficientOscillationError).
FitResult fit_ringdown(std::span<const double> t, std::span<const double> y, FitWindow window);

/// Least-squares line through (log t, log |y|); `rate` holds the exponent
/// and the sign of the data is carried by the amplitude. Requires t > 0, a
/// single sign of y and at least 10 samples on the window.
FitResult fit_powerlaw(std::span<const double> t, std::span<const double> y, FitWindow window);

/// Power law with a free time origin, y = A (t - t0)^rate with t0 below the
/// window. An autonomous system approaches a power law only up to a time
/// translation, which a plain log-log fit misreads as a drifting exponent.
/// t0 is found by a one-dimensional minimization of the log-space misfit,
/// with (A, rate) from the linear fit at each trial t0.
FitResult fit_powerlaw_shifted(std::span<const double> t, std::span<const double> y, FitWindow window);

FitResult fit(FitModel model, std::span<const double> t, std::span<const double> y, FitWindow window);

/// RMS misfit of `fit` against the data on `window`, relative to the RMS of
/// the data.
double relative_misfit(const FitResult& fit, std::span<const double> t, std::span<const double> y, FitWindow window);

struct WindowSearch {
    /// Width of candidate windows (in t; for power laws the window spans
    /// [hi / ratio, hi] with ratio = exp(width)).
    double width = 10.0;
    /// Candidates are shifted by this fraction of the width.
    double step_fraction = 0.1;
    /// Samples with |y| below floor * max|y| are ignored (integration noise).
    double floor = 1e-12;
    /// Rates of the two window halves must agree to this relative tolerance.
    double stationarity = 0.01;
    double max_residual = 0.05;
};

/// Latest window on which the fitted rate is stationary: the fits on both
/// halves agree with the full fit and the misfit is small. Throws
/// InsufficientDataError when no window qualifies.
FitWindow select_window(FitModel model, std::span<const double> t, std::span<const double> y,
                        const WindowSearch& search = {});

}  // namespace ymwh
