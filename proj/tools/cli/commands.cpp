#include "commands.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "support.hpp"
#include "ymwh/dynamics.hpp"
#include "ymwh/errors.hpp"
#include "ymwh/evolution.hpp"
#include "ymwh/io.hpp"
#include "ymwh/spectra.hpp"
#include "ymwh/static_solver.hpp"

namespace ymwh::cli {

using nlohmann::json;

namespace {

PhysParams require_ell(const Common& c)
{
    if (!c.ell) throw PreconditionError("--ell is required for this command");
    return PhysParams(*c.ell);
}

std::string file_label(const std::string& label)
{
    std::string out;
    for (char ch : label) {
        if (ch == '*') out += "star";
        else if (ch == '-') out += "minus";
        else if (std::isalnum(static_cast<unsigned char>(ch))) out += ch;
    }
    return out;
}

json map_json(const std::map<std::size_t, double>& m)
{
    json j = json::object();
    for (const auto& [n, v] : m) j[std::to_string(n)] = v;
    return j;
}

std::string energy_row(const StaticProfile& p)
{
    return p.label() + "," + std::to_string(p.zero_count) + "," + to_string(p.parity) + "," +
           io::format_number(p.shoot) + "," + io::format_number(p.w_inf) + "," + io::format_number(p.energy) + "\n";
}

/// Leading (largest real part) eigenvalue of the static solution with the
/// given catalogue label.
double unstable_rate(const std::string& label, PhysParams params)
{
    if (label == "W*" || label == "-W*") return params.ell();
    const auto pos = label.find('W');
    if (pos == std::string::npos || pos + 1 >= label.size()) {
        throw PreconditionError("no unstable rate for attractor '" + label + "'");
    }
    const int n = std::stoi(label.substr(pos + 1));
    if (n == 0) throw PreconditionError("W0 has no unstable mode");
    const ModeSet modes = pencil_spectrum(find_static(params, n), 40);
    if (modes.unstable_count == 0) throw NumericalError("no unstable mode found for " + label);
    return modes.modes.front().lambda.real();
}

void print_profile(const StaticProfile& p)
{
    std::printf("  %-4s n=%d %-4s shoot=%.12g w_inf=%.12g E=%.10g\n", p.label().c_str(), p.zero_count,
                to_string(p.parity).c_str(), p.shoot, p.w_inf, p.energy);
}

}  // namespace

int run_static(const Common& common, const StaticArgs& args)
{
    json params = {{"n", args.n ? json(*args.n) : json(nullptr)}, {"all", args.all}};
    if (args.sweep) params["sweep"] = *args.sweep;
    if (common.ell) params["ell"] = *common.ell;

    std::vector<double> sweep;
    if (args.sweep) {
        sweep = parse_number_list(*args.sweep);
    } else if (args.all && common.ell) {
        // default bifurcation sweep over (0, ell] in steps of 0.05
        for (int k = 1; 0.05 * k <= *common.ell + 1e-12; ++k) sweep.push_back(0.05 * k);
    }
    if (!common.ell && sweep.empty()) throw PreconditionError("static needs --ell or --sweep");

    OutputSink out(std::filesystem::path(common.out) / "static", common.command, params);
    if (common.ell) {
        const PhysParams p(*common.ell);
        std::vector<StaticProfile> profiles;
        if (args.n && !args.all) {
            if (*args.n < 0) throw PreconditionError("--n must be nonnegative");
            if (*args.n == 0) profiles.push_back(ground_profile(p));
            else profiles.push_back(find_static(p, *args.n));
        } else {
            profiles = enumerate_statics(p);
        }
        std::string table = "label,n,parity,shoot,w_inf,energy\n";
        json summary = json::array();
        std::printf("static solutions at ell = %g\n", p.ell());
        for (const StaticProfile& prof : profiles) {
            print_profile(prof);
            out.csv("profile_" + file_label(prof.label()) + ".csv", io::profile_csv(prof));
            table += energy_row(prof);
            summary.push_back(io::to_json(prof));
        }
        out.csv("energies.csv", table);
        out.json("static.json", {{"ell", p.ell()}, {"E_star", 0.5 * p.coupling()}, {"solutions", summary}});
    }
    if (!sweep.empty()) {
        std::string table = "ell,label,n,parity,shoot,energy,E_star\n";
        std::size_t skipped = 0;
        for (double ell : sweep) {
            const PhysParams p(ell);
            if (p.is_integer()) {
                ++skipped;
                continue;
            }
            for (const StaticProfile& prof : enumerate_statics(p)) {
                if (prof.is_constant()) continue;
                table += io::format_number(ell) + "," + prof.label() + "," + std::to_string(prof.zero_count) + "," +
                         to_string(prof.parity) + "," + io::format_number(prof.shoot) + "," +
                         io::format_number(prof.energy) + "," + io::format_number(0.5 * p.coupling()) + "\n";
            }
        }
        out.csv("bifurcation.csv", table);
        std::printf("bifurcation table: %zu couplings (%zu integer values skipped)\n", sweep.size() - skipped,
                    skipped);
    }
    out.finish();
    return 0;
}

int run_spectrum(const Common& common, const SpectrumArgs& args)
{
    const PhysParams p = require_ell(common);
    std::string bg = args.background;
    std::transform(bg.begin(), bg.end(), bg.begin(), [](unsigned char ch) { return std::tolower(ch); });
    if (args.M < 4) throw PreconditionError("--M must be at least 4");

    ModeSet pencil;
    std::optional<ModeSet> closed;
    if (bg == "star" || bg == "ground") {
        const StaticKind kind = bg == "star" ? StaticKind::star : StaticKind::ground;
        const ChebSeries series = bg == "star" ? ChebSeries(args.M) : ChebSeries::unit(0, args.M);
        pencil = pencil_spectrum(series, p, args.M, bg == "star" ? Background::star() : Background::ground(),
                                 args.margin);
        closed = closed_spectrum(kind, p, args.j_max);
    } else {
        std::string digits = bg;
        if (!digits.empty() && digits.front() == 'w') digits.erase(0, 1);
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), ::isdigit)) {
            throw PreconditionError("unknown background '" + args.background + "' (star, ground or w<n>)");
        }
        const int n = std::stoi(digits);
        if (n == 0) {
            pencil = pencil_spectrum(ChebSeries::unit(0, args.M), p, args.M, Background::ground(), args.margin);
            closed = closed_spectrum(StaticKind::ground, p, args.j_max);
        } else {
            pencil = pencil_spectrum(find_static(p, n), args.M, args.margin);
        }
    }

    json result = {{"pencil", io::to_json(pencil)}, {"M", args.M}, {"filter_margin", args.margin}};
    std::printf("spectrum of %s at ell = %g (M = %zu): %d unstable\n", pencil.background.label().c_str(), p.ell(),
                args.M, pencil.unstable_count);
    json comparison = json::array();
    for (const Mode& m : pencil.modes) {
        json row = {{"re", m.lambda.real()}, {"im", m.lambda.imag()}, {"parity", to_string(m.parity)}};
        std::string extra;
        if (closed && !closed->modes.empty()) {
            const Mode* best = nullptr;
            double dist = std::numeric_limits<double>::infinity();
            for (const Mode& c : closed->modes) {
                if (std::abs(c.lambda - m.lambda) < dist) {
                    dist = std::abs(c.lambda - m.lambda);
                    best = &c;
                }
            }
            row["closed_re"] = best->lambda.real();
            row["closed_im"] = best->lambda.imag();
            row["difference"] = dist;
            char buf[64];
            std::snprintf(buf, sizeof buf, "  closed %+.10f %+.10fi", best->lambda.real(), best->lambda.imag());
            extra = buf;
        }
        comparison.push_back(std::move(row));
        std::printf("  %+.10f %+.10fi %-4s%s\n", m.lambda.real(), m.lambda.imag(), to_string(m.parity).c_str(),
                    extra.c_str());
    }
    result["comparison"] = comparison;
    if (closed) result["closed_form"] = io::to_json(*closed);

    OutputSink out(std::filesystem::path(common.out) / "spectrum", common.command,
                   {{"ell", p.ell()}, {"background", args.background}, {"M", args.M}, {"j_max", args.j_max},
                    {"margin", args.margin}});
    out.json("spectrum.json", result);
    out.finish();
    return 0;
}

int run_evolve(const Common& common, const EvolveArgs& args)
{
    if (args.data.has_value() == args.state.has_value()) {
        throw PreconditionError("evolve needs exactly one of --data or --state");
    }
    EvolConfig c;
    c.N = common.N.value_or(40);
    c.tau_end = common.tau_end.value_or(60.0);
    c.rtol = common.rtol.value_or(1e-10);
    c.atol = common.atol.value_or(1e-12);
    c.stride = common.stride.value_or(0.01);
    c.stepping = args.fixed_rk4 ? Stepping::fixed_rk4 : Stepping::adaptive;
    c.dt = args.dt;
    c.observation_points = args.observe.empty() || args.observe == "none" ? std::vector<double>{}
                                                                            : parse_number_list(args.observe);
    if (args.coefficients != "all") c.coefficients = parse_index_list(args.coefficients);
    c.checkpoint_interval = args.checkpoint_interval;
    c.record_energy = !args.no_energy;

    json params = {{"N", c.N},
                   {"tau_end", c.tau_end},
                   {"rtol", c.rtol},
                   {"atol", c.atol},
                   {"stride", c.stride},
                   {"stepping", args.fixed_rk4 ? "fixed_rk4" : "adaptive"},
                   {"dt", c.dt},
                   {"observation_points", c.observation_points},
                   {"coefficients", args.coefficients},
                   {"checkpoint_interval", c.checkpoint_interval},
                   {"record_energy", c.record_energy}};

    std::optional<EvolState> initial;
    if (args.data) {
        const PhysParams p = require_ell(common);
        const auto map = parse_coefficient_map(*args.data);
        if (map.rbegin()->first > c.N) {
            throw PreconditionError("initial data index " + std::to_string(map.rbegin()->first) +
                                    " exceeds the truncation order N = " + std::to_string(c.N));
        }
        initial = EvolState::at_rest(series_from_map(map, c.N), c.N, p);
        params["ell"] = p.ell();
        params["data"] = map_json(map);
    } else {
        initial = io::state_from_json(io::read_json(*args.state));
        if (common.ell && *common.ell != initial->params.ell()) {
            throw PreconditionError("--ell disagrees with the coupling stored in the state file");
        }
        params["ell"] = initial->params.ell();
        params["state"] = *args.state;
        params["tau_start"] = initial->tau;
    }

    const Trajectory traj = evolve(*initial, c);
    OutputSink out(std::filesystem::path(common.out) / "evolve", common.command, params);
    out.csv("trajectory.csv", io::trajectory_csv(traj));
    json meta = io::trajectory_metadata(traj);
    meta["config"] = params;
    if (!traj.energy.empty()) {
        meta["energy_balance_residual"] = energy_balance_residual(traj);
        meta["max_energy_increase"] = max_energy_increase(traj);
    }
    out.json("trajectory.json", meta);
    out.json("final_state.json", io::to_json(*traj.final_state));
    for (std::size_t k = 0; k < traj.checkpoints.size(); ++k) {
        char name[48];
        std::snprintf(name, sizeof name, "checkpoints/state_%04zu.json", k);
        out.json(name, io::to_json(traj.checkpoints[k]));
    }
    out.finish();

    const EvolState& f = *traj.final_state;
    std::printf("evolved to tau = %g (N = %zu, %zu samples); a_0 = %.12g\n", f.tau, traj.N, traj.times.size(), f.a[0]);
    if (!traj.energy.empty()) {
        std::printf("energy %.12g -> %.12g, balance residual %.3e\n", traj.energy.front(), traj.energy.back(),
                    energy_balance_residual(traj));
    }
    return 0;
}

int run_bisect(const Common& common, const BisectArgs& args)
{
    const PhysParams p = require_ell(common);
    const Family family = family_by_name(args.family);
    const auto [lo, hi] = parse_range(args.range);
    if (args.digits < 1 || args.digits > 16) throw PreconditionError("--digits must be in 1..16");

    BisectConfig bc;
    bc.evol.N = common.N.value_or(40);
    bc.evol.rtol = common.rtol.value_or(1e-10);
    bc.evol.atol = common.atol.value_or(1e-12);
    bc.evol.stride = common.stride.value_or(0.01);
    bc.tau_max = args.tau_max;

    json params = {{"ell", p.ell()},       {"family", args.family}, {"range", args.range},
                   {"digits", args.digits}, {"N", bc.evol.N},        {"rtol", bc.evol.rtol},
                   {"atol", bc.evol.atol},  {"stride", bc.evol.stride}, {"tau_max", bc.tau_max},
                   {"phases", args.phases}, {"lifetimes", args.lifetimes}};
    if (args.lifetimes) {
        params["offsets"] = args.offsets;
        params["delta"] = args.delta;
    }

    CriticalResult r = bisect_critical(family, p, lo, hi, args.digits, bc);
    std::printf("c_* in [%.17g, %.17g] after %d halvings (signs %+d / %+d)\n", r.c_lo, r.c_hi, r.halvings, r.sign_lo,
                r.sign_hi);
    std::printf("intermediate attractor %s, closest L2 distance %.3e\n", r.intermediate.c_str(),
                r.intermediate_distance);

    OutputSink out(std::filesystem::path(common.out) / "bisect", common.command, params);
    json extra = json::object();
    const bool have_attractor = r.intermediate != "undecided";
    ChebSeries attractor;
    if (have_attractor && (args.phases || args.lifetimes)) {
        for (const CatalogueEntry& e : intermediate_candidates(family.parity, p, bc.evol.N)) {
            if (e.label == r.intermediate) attractor = e.series;
        }
    }
    if (r.run_lo && r.run_hi) {
        out.csv("run_lo.csv", io::trajectory_csv(*r.run_lo));
        out.csv("run_hi.csv", io::trajectory_csv(*r.run_hi));
    }
    if (args.phases) {
        if (!have_attractor || !r.run_lo || !r.run_hi) {
            throw NumericalError("three-phase analysis needs an intermediate attractor and the final pair");
        }
        const PhaseAnalysis a = three_phase_analysis(*r.run_lo, attractor, {}, &*r.run_hi);
        const PhaseAnalysis b = three_phase_analysis(*r.run_hi, attractor, {}, &*r.run_lo);
        extra["phases"] = {{"lo", io::to_json(a)}, {"hi", io::to_json(b)}};
        for (const PhaseAnalysis* ph : {&a, &b}) {
            std::printf("phases: approach %.5f, escape %.5f, ringdown %.5f %+.5fi\n", ph->approach.rate,
                        -ph->escape.rate, ph->ringdown.rate, ph->ringdown.frequency.value_or(0.0));
        }
    }
    if (args.lifetimes) {
        if (!have_attractor) throw NumericalError("lifetime scaling needs an intermediate attractor");
        const double gamma = unstable_rate(r.intermediate, p);
        const ScalingResult s =
            lifetime_scaling(family, p, r.c_star(), parse_number_list(args.offsets), attractor, gamma, args.delta, bc);
        r.lifetimes.clear();
        for (const auto& [offset, life] : s.samples) r.lifetimes.emplace_back(r.c_star() + offset, life);
        extra["scaling"] = io::to_json(s);
        extra["scaling"]["gamma"] = gamma;
        out.csv("lifetimes.csv", io::lifetime_csv(s.samples));
        std::printf("lifetime slope %.5f (predicted 1/gamma = %.5f)\n", s.slope, s.predicted);
    }
    json result = io::to_json(r);
    result.update(extra);
    out.json("critical.json", result);
    out.finish();
    return 0;
}

int run_converge(const Common& common, const ConvergeArgs& args)
{
    const PhysParams p = require_ell(common);
    const auto map = parse_coefficient_map(args.data);
    std::vector<std::size_t> orders = parse_index_list(args.orders);
    const std::size_t ref = args.reference.value_or(*std::max_element(orders.begin(), orders.end()));
    const double rtol = common.rtol.value_or(1e-13);
    for (std::size_t N : orders) {
        if (N > ref) throw PreconditionError("order " + std::to_string(N) + " exceeds the reference order");
        if (N < map.rbegin()->first) throw PreconditionError("order " + std::to_string(N) + " drops initial data");
    }
    const EvolState initial = EvolState::at_rest(series_from_map(map, ref), ref, p);
    const auto rows = convergence_experiment(initial, orders, ref, args.tau, rtol);

    std::printf("squared L2 difference at tau = %g against N = %zu\n", args.tau, ref);
    for (const ConvergenceRow& row : rows) std::printf("  N = %3zu  %.6e\n", row.N, row.l2_squared);
    OutputSink out(std::filesystem::path(common.out) / "converge", common.command,
                   {{"ell", p.ell()}, {"data", map_json(map)}, {"orders", orders}, {"reference", ref},
                    {"tau", args.tau}, {"rtol", rtol}});
    out.csv("convergence.csv", io::convergence_csv(rows));
    out.finish();
    return 0;
}

}  // namespace ymwh::cli
