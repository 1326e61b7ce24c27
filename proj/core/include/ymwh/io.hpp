#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ymwh/chebyshev.hpp"
#include "ymwh/dynamics.hpp"
#include "ymwh/evolution.hpp"
#include "ymwh/fitting.hpp"
#include "ymwh/galerkin.hpp"
#include "ymwh/spectra.hpp"
#include "ymwh/static_solver.hpp"

namespace ymwh::io {

using nlohmann::json;

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

// Chebyshev series as a plain array of coefficients.
json to_json(const ChebSeries& s);
ChebSeries series_from_json(const json& j);

// States as {tau, ell, a, a_dot}.
json to_json(const EvolState& s);
EvolState state_from_json(const json& j);

/// Summary of a static profile: label, parity, zero count, shoot, w_inf,
/// energy and the identity residuals.
json to_json(const StaticProfile& p);
/// Columns r, W, Wprime.
std::string profile_csv(const StaticProfile& p);

/// {background, ell, unstable_count, modes: [{re, im, parity, source}]}.
json to_json(const ModeSet& m);

json to_json(const FitResult& f);
json to_json(const PhaseAnalysis& p);
json to_json(const ScalingResult& s);
/// Bracket, signs, probes and intermediate attractor. Trajectories are not
/// included.
json to_json(const CriticalResult& c);

/// One row per sample: tau, the recorded coefficients a<n>, W and dW/dtau
/// at each observation point, then the energy columns when present.
std::string trajectory_csv(const Trajectory& t);
/// ell, N, sample count and time span, recorded columns and whether the
/// run stopped early.
json trajectory_metadata(const Trajectory& t);

/// Columns offset, lifetime.
std::string lifetime_csv(const std::vector<std::pair<double, double>>& samples);
/// Columns N, l2_squared.
std::string convergence_csv(const std::vector<ConvergenceRow>& rows);

/// Writes text to a file, creating parent directories. Throws Error when
/// the file cannot be written.
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

}  // namespace ymwh::io
