#include "ymwh/io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ymwh/errors.hpp"

namespace ymwh::io {

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string join_row(const std::vector<double>& values)
{
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += format_number(values[i]);
    }
    out += '\n';
    return out;
}

std::string point_label(double x) { return format_number(x); }

}  // namespace

std::string format_number(double v)
{
    char buf[32];
    // Increase the precision until the text round-trips.
    for (int digits = 15; digits <= 17; ++digits) {
        std::snprintf(buf, sizeof buf, "%.*g", digits, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

json to_json(const ChebSeries& s) { return json(s.vector()); }

ChebSeries series_from_json(const json& j)
{
    if (!j.is_array() || j.empty()) throw PreconditionError("series: expected a nonempty array of coefficients");
    return ChebSeries(j.get<std::vector<double>>());
}

json to_json(const EvolState& s)
{
    return {{"tau", s.tau}, {"ell", s.params.ell()}, {"a", to_json(s.a)}, {"a_dot", to_json(s.a_dot)}};
}

EvolState state_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("a") || !j.contains("ell")) {
        throw PreconditionError("state: expected an object with at least \"ell\" and \"a\"");
    }
    ChebSeries a = series_from_json(j.at("a"));
    ChebSeries a_dot = j.contains("a_dot") ? series_from_json(j.at("a_dot")) : ChebSeries(a.order());
    const double tau = j.value("tau", 0.0);
    return EvolState(std::move(a), std::move(a_dot), tau, PhysParams(j.at("ell").get<double>()));
}

json to_json(const StaticProfile& p)
{
    json j = {
        {"label", p.label()},
        {"ell", p.params.ell()},
        {"parity", to_string(p.parity)},
        {"n", p.zero_count},
        {"shoot", p.shoot},
        {"w_inf", p.w_inf},
        {"energy", p.energy},
        {"r_max", p.options.r_max},
        {"grid_step", p.options.grid_step},
    };
    if (!p.is_constant()) {
        const EnergyForms forms = static_energy_forms(p);
        const IdentityResiduals res = identity_residuals(p);
        j["residuals"] = {
            {"energy_forms", std::abs(forms.direct - forms.virial)},
            {"virial", res.virial},
            {"odd_identity", res.odd_identity},
            {"q_monotonicity_violations", res.q_monotonicity_violations},
        };
    }
    return j;
}

std::string profile_csv(const StaticProfile& p)
{
    std::string out = "r,W,Wprime\n";
    for (std::size_t i = 0; i < p.r.size(); ++i) out += join_row({p.r[i], p.w[i], p.w_prime[i]});
    return out;
}

json to_json(const ModeSet& m)
{
    json modes = json::array();
    for (const Mode& mode : m.modes) {
        json e = {{"re", mode.lambda.real()},
                  {"im", mode.lambda.imag()},
                  {"parity", to_string(mode.parity)},
                  {"source", to_string(mode.source)}};
        if (mode.source == ModeSource::closed_form) {
            e["j"] = mode.j;
            e["branch"] = mode.branch;
        }
        modes.push_back(std::move(e));
    }
    return {{"background", m.background.label()},
            {"ell", m.params.ell()},
            {"unstable_count", m.unstable_count},
            {"modes", std::move(modes)}};
}

json to_json(const FitResult& f)
{
    return {{"model", to_string(f.model)},
            {"rate", f.rate},
            {"frequency", optional_number(f.frequency)},
            {"amplitude", f.amplitude},
            {"phase", optional_number(f.phase)},
            {"origin", optional_number(f.origin)},
            {"window", {f.window.lo, f.window.hi}},
            {"residual", f.residual},
            {"samples", f.samples}};
}

json to_json(const PhaseAnalysis& p)
{
    return {{"approach", to_json(p.approach)},
            {"approach_oscillation", p.approach_oscillation ? to_json(*p.approach_oscillation) : json(nullptr)},
            {"escape", to_json(p.escape)},
            {"ringdown", to_json(p.ringdown)},
            {"closest_time", p.closest_time},
            {"closest_distance", p.closest_distance},
            {"exit_time", p.exit_time},
            {"final_sign", p.final_sign}};
}

json to_json(const ScalingResult& s)
{
    json samples = json::array();
    for (const auto& [offset, lifetime] : s.samples) samples.push_back({offset, lifetime});
    return {{"slope", s.slope}, {"intercept", s.intercept}, {"predicted", s.predicted}, {"samples", samples}};
}

json to_json(const CriticalResult& c)
{
    json probes = json::array();
    for (const Probe& p : c.probes) probes.push_back({{"c", p.c}, {"sign", p.sign}, {"decided_at", p.decided_at}});
    json lifetimes = json::array();
    for (const auto& [cc, life] : c.lifetimes) lifetimes.push_back({cc, life});
    return {{"family", c.family},
            {"ell", c.params.ell()},
            {"c_lo", c.c_lo},
            {"c_hi", c.c_hi},
            {"c_star", c.c_star()},
            {"sign_lo", c.sign_lo},
            {"sign_hi", c.sign_hi},
            {"halvings", c.halvings},
            {"intermediate", c.intermediate},
            {"intermediate_distance", c.intermediate_distance},
            {"probes", probes},
            {"lifetimes", lifetimes}};
}

std::string trajectory_csv(const Trajectory& t)
{
    std::string out = "tau";
    for (std::size_t n : t.coefficient_index) out += ",a" + std::to_string(n);
    for (double x : t.observation_points) out += ",W(" + point_label(x) + ")";
    for (double x : t.observation_points) out += ",Wdot(" + point_label(x) + ")";
    const bool energy = !t.energy.empty();
    if (energy) out += ",energy,flux_left,flux_right,kinetic,radiated";
    out += '\n';

    std::vector<double> row;
    for (std::size_t k = 0; k < t.times.size(); ++k) {
        row.clear();
        row.push_back(t.times[k]);
        row.insert(row.end(), t.coefficients[k].begin(), t.coefficients[k].end());
        if (!t.observation_points.empty()) {
            row.insert(row.end(), t.field[k].begin(), t.field[k].end());
            row.insert(row.end(), t.field_dot[k].begin(), t.field_dot[k].end());
        }
        if (energy) {
            row.insert(row.end(), {t.energy[k], t.flux_left[k], t.flux_right[k], t.kinetic[k], t.radiated[k]});
        }
        out += join_row(row);
    }
    return out;
}

json trajectory_metadata(const Trajectory& t)
{
    return {{"ell", t.params.ell()},
            {"N", t.N},
            {"linearized", t.linearized},
            {"samples", t.times.size()},
            {"tau_start", t.times.empty() ? 0.0 : t.times.front()},
            {"tau_end", t.times.empty() ? 0.0 : t.times.back()},
            {"coefficients", t.coefficient_index},
            {"observation_points", t.observation_points},
            {"energy_recorded", !t.energy.empty()},
            {"checkpoints", t.checkpoints.size()},
            {"stopped_early", t.stopped_early}};
}

std::string lifetime_csv(const std::vector<std::pair<double, double>>& samples)
{
    std::string out = "offset,lifetime\n";
    for (const auto& [offset, lifetime] : samples) out += join_row({offset, lifetime});
    return out;
}

std::string convergence_csv(const std::vector<ConvergenceRow>& rows)
{
    std::string out = "N,l2_squared\n";
    for (const ConvergenceRow& r : rows) out += std::to_string(r.N) + "," + format_number(r.l2_squared) + "\n";
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    f << text;
    if (!f) throw Error("failed writing " + path.string());
}

void write_json(const std::filesystem::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw PreconditionError("cannot open " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw PreconditionError(path.string() + ": " + e.what());
    }
}

}  // namespace ymwh::io
