#include <cmath>
#include <cstdio>

#include "commands.hpp"
#include "support.hpp"
#include "ymwh/dynamics.hpp"
#include "ymwh/errors.hpp"
#include "ymwh/evolution.hpp"
#include "ymwh/fitting.hpp"
#include "ymwh/io.hpp"
#include "ymwh/spectra.hpp"
#include "ymwh/static_solver.hpp"

namespace ymwh::cli {

using nlohmann::json;

namespace {

constexpr std::size_t kOrder = 40;

std::string snapshot_csv(const std::vector<EvolState>& states, const std::vector<const ChebSeries*>& extra = {},
                         const std::vector<std::string>& extra_names = {})
{
    std::string out = "x";
    for (const EvolState& s : states) out += ",W(tau=" + io::format_number(s.tau) + ")";
    for (const std::string& name : extra_names) out += "," + name;
    out += '\n';
    constexpr int points = 200;
    for (int i = 0; i <= points; ++i) {
        const double x = -1.0 + 2.0 * i / points;
        out += io::format_number(x);
        for (const EvolState& s : states) out += "," + io::format_number(eval_series(s.a, x));
        for (const ChebSeries* e : extra) out += "," + io::format_number(eval_series(*e, x));
        out += '\n';
    }
    return out;
}

std::string series_csv(const std::vector<std::string>& names, const std::vector<const std::vector<double>*>& cols)
{
    std::string out;
    for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
    out += '\n';
    for (std::size_t k = 0; k < cols.front()->size(); ++k) {
        for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + io::format_number((*cols[i])[k]);
        out += '\n';
    }
    return out;
}

EvolState rest_data(std::initializer_list<std::pair<std::size_t, double>> coefficients, double ell)
{
    ChebSeries a(kOrder);
    for (const auto& [n, v] : coefficients) a.at(n) = v;
    return EvolState::at_rest(a, kOrder, PhysParams(ell));
}

EvolState ic_ground() { return rest_data({{1, 1.0}, {4, 1.0}, {5, 1.0}}, 3.5); }
EvolState ic_odd(double ell) { return rest_data({{1, 2.0}, {5, 1.0}}, ell); }

json expect(double expected, double measured)
{
    return {{"expected", expected}, {"measured", measured}, {"relative_error", std::abs(measured / expected - 1.0)}};
}

void figure1(OutputSink& out)
{
    const PhysParams p(6.5);
    const auto profiles = enumerate_statics(p);
    std::string table = "label,n,parity,shoot,w_inf,energy\n";
    std::vector<std::string> names{"x"};
    std::vector<std::vector<double>> cols;
    json summary = json::array();
    for (const StaticProfile& prof : profiles) {
        summary.push_back(io::to_json(prof));
        table += prof.label() + "," + std::to_string(prof.zero_count) + "," + to_string(prof.parity) + "," +
                 io::format_number(prof.shoot) + "," + io::format_number(prof.w_inf) + "," +
                 io::format_number(prof.energy) + "\n";
        if (prof.is_constant()) continue;
        if (cols.empty()) {
            cols.emplace_back();
            for (double r : prof.r) cols.back().push_back(std::tanh(r));
        }
        names.push_back(prof.label());
        cols.push_back(prof.w);
    }
    std::vector<const std::vector<double>*> ptrs;
    for (const auto& c : cols) ptrs.push_back(&c);
    out.csv("profiles.csv", series_csv(names, ptrs));
    out.csv("energies.csv", table);
    out.json("static.json", {{"ell", p.ell()}, {"solutions", summary}});
    std::printf("figure 1: %zu static solutions at ell = 6.5\n", profiles.size());
}

void figure2(OutputSink& out)
{
    std::string table = "ell,label,n,parity,shoot,energy,E_star\n";
    for (int k = 1; k <= 140; ++k) {
        const double ell = 0.05 * k;
        const PhysParams p(ell);
        if (p.is_integer(1e-9)) continue;
        for (const StaticProfile& prof : enumerate_statics(p)) {
            if (prof.is_constant()) continue;
            table += io::format_number(ell) + "," + prof.label() + "," + std::to_string(prof.zero_count) + "," +
                     to_string(prof.parity) + "," + io::format_number(prof.shoot) + "," +
                     io::format_number(prof.energy) + "," + io::format_number(0.5 * p.coupling()) + "\n";
        }
    }
    out.csv("bifurcation.csv", table);
    std::printf("figure 2: bifurcation table for ell in (0, 7]\n");
}

void relaxation_snapshots(OutputSink& out, const EvolState& initial, double tau_end, const ChebSeries* overlay,
                          const std::string& overlay_name)
{
    EvolConfig c;
    c.N = kOrder;
    c.tau_end = tau_end;
    c.checkpoint_interval = 1.0;
    c.observation_points = {-1.0, 0.0, 1.0};
    c.coefficients = {0, 1, 2, 3, 4, 5};
    const Trajectory t = evolve(initial, c);
    std::vector<EvolState> snaps;
    for (const EvolState& s : t.checkpoints) {
        const double r = std::round(s.tau);
        if (r == 0 || r == 1 || r == 2 || r == 3 || r == 5 || r == 10 || r == 20) snaps.push_back(s);
    }
    if (overlay) out.csv("snapshots.csv", snapshot_csv(snaps, {overlay}, {overlay_name}));
    else out.csv("snapshots.csv", snapshot_csv(snaps));
    out.csv("trajectory.csv", io::trajectory_csv(t));
    json meta = io::trajectory_metadata(t);
    meta["energy_balance_residual"] = energy_balance_residual(t);
    out.json("trajectory.json", meta);
}

void figure3(OutputSink& out)
{
    relaxation_snapshots(out, ic_ground(), 20.0, nullptr, "");
    std::printf("figure 3: relaxation to W0 at ell = 3.5\n");
}

void figure4(OutputSink& out)
{
    EvolConfig c;
    c.N = kOrder;
    c.tau_end = 60.0;
    c.coefficients = {0};
    c.observation_points = {};
    const Trajectory t = evolve(ic_ground(), c);
    std::vector<double> dev = t.coefficient_series(0);
    for (double& v : dev) v -= 1.0;
    // a_0 - 1 carries the roundoff of a_0 itself, about 1e-16 absolute.
    WindowSearch ws;
    ws.floor = 1e-9;
    const FitWindow w = select_window(FitModel::ringdown, t.times, dev, ws);
    const FitResult f = fit_ringdown(t.times, dev, w);
    const ModeSet closed = closed_spectrum(StaticKind::ground, PhysParams(3.5), 0);
    const auto lambda = closed.modes.front().lambda;
    std::vector<double> absdev = dev;
    for (double& v : absdev) v = std::abs(v);
    out.csv("a0_deviation.csv", series_csv({"tau", "a0_minus_1", "abs"}, {&t.times, &dev, &absdev}));
    out.json("fit.json", {{"fit", io::to_json(f)},
                          {"rate", expect(-lambda.real(), f.rate)},
                          {"frequency", expect(std::abs(lambda.imag()), *f.frequency)}});
    std::printf("figure 4: a0 - 1 ringdown rate %.7f freq %.7f (expected %.7f, %.7f)\n", f.rate, *f.frequency,
                -lambda.real(), std::abs(lambda.imag()));
}

void figure5(OutputSink& out)
{
    relaxation_snapshots(out, ic_odd(0.125), 20.0, nullptr, "");
    std::printf("figure 5: relaxation to W* at ell = 1/8\n");
}

void figure6(OutputSink& out)
{
    json result;
    {
        EvolConfig c;
        c.N = kOrder;
        c.tau_end = 40.0;
        c.atol = 1e-30;
        c.coefficients = {1, 3};
        c.observation_points = {};
        const Trajectory t = evolve(ic_odd(0.125), c);
        auto a1 = t.coefficient_series(1);
        auto a3 = t.coefficient_series(3);
        for (double& v : a1) v = std::abs(v);
        for (double& v : a3) v = std::abs(v);
        const FitResult f1 = fit_exponential(t.times, a1, {20.0, 30.0});
        const FitResult f3 = fit_exponential(t.times, a3, {20.0, 30.0});
        out.csv("ell_0.125.csv", series_csv({"tau", "abs_a1", "abs_a3"}, {&t.times, &a1, &a3}));
        const double ratio = f3.amplitude / std::pow(f1.amplitude, 3);
        result["ell_0.125"] = {{"a1", io::to_json(f1)}, {"a3", io::to_json(f3)},
                               {"rate_a1", expect(0.875, f1.rate)}, {"rate_a3", expect(2.625, f3.rate)},
                               {"amplitude_ratio", expect(3.0 / 32.0, ratio)}};
        std::printf("figure 6: ell = 1/8 rates %.6f %.6f, B/A^3 = %.5f (3/32 = %.5f), A = %.4f\n", f1.rate, f3.rate,
                    ratio, 3.0 / 32.0, f1.amplitude);
    }
    {
        EvolConfig c;
        c.N = kOrder;
        c.tau_end = 1000.0;
        c.stride = 0.1;
        c.coefficients = {1, 3};
        c.observation_points = {};
        c.checkpoint_interval = 0.0;
        const Trajectory t = evolve(ic_odd(1.0), c);
        const auto a1 = t.coefficient_series(1);
        const auto a3 = t.coefficient_series(3);
        const FitResult f1 = fit_powerlaw_shifted(t.times, a1, {100.0, 1000.0});
        const FitResult f3 = fit_powerlaw_shifted(t.times, a3, {100.0, 1000.0});
        const FitResult g1 = fit_powerlaw(t.times, a1, {100.0, 1000.0});
        out.csv("ell_1.csv", series_csv({"tau", "a1", "a3"}, {&t.times, &a1, &a3}));
        const double s = std::sqrt(5.0);
        result["ell_1"] = {{"a1", io::to_json(f1)},
                           {"a3", io::to_json(f3)},
                           {"a1_unshifted", io::to_json(g1)},
                           {"exponent_a1", expect(-0.5, f1.rate)},
                           {"exponent_a3", expect(-1.5, f3.rate)},
                           {"amplitude_a1", expect(s / 2.0, std::abs(f1.amplitude))},
                           {"amplitude_a3", expect(s / 32.0, std::abs(f3.amplitude))}};
        std::printf("figure 6: ell = 1 exponents %.5f %.5f (unshifted %.5f), amplitudes %.5f %.5f\n", f1.rate,
                    f3.rate, g1.rate, f1.amplitude, f3.amplitude);
    }
    out.json("fits.json", result);
}

void figure7(OutputSink& out)
{
    const PhysParams p(3.5);
    const ChebSeries w1 = to_cheb(find_static(p, 1), 80).resized(kOrder);
    relaxation_snapshots(out, ic_odd(3.5), 20.0, &w1, "W1");
    std::printf("figure 7: relaxation to W1 at ell = 3.5\n");
}

void figure8(OutputSink& out)
{
    const PhysParams p(3.5);
    const StaticProfile w1 = find_static(p, 1);
    EvolConfig c;
    c.N = kOrder;
    c.tau_end = 60.0;
    c.observation_points = {1.0};
    c.coefficients = {0};
    const Trajectory t = evolve(ic_odd(3.5), c);
    std::vector<double> dev = t.field_series(0);
    for (double& v : dev) v -= w1.w_inf;
    std::vector<double> absdev = dev;
    for (double& v : absdev) v = std::abs(v);
    const FitResult f = fit_ringdown(t.times, dev, {30.0, 45.0});
    const ModeSet modes = pencil_spectrum(w1, 40);
    std::optional<Mode> qnm;
    for (const Mode& m : modes.modes) {
        if (m.lambda.real() < -kUnstableThreshold && m.lambda.imag() > 0.0 && m.parity == Parity::odd) {
            qnm = m;
            break;
        }
    }
    if (!qnm) throw NumericalError("figure 8: no oscillating odd mode of W1 found");
    out.csv("deviation_x1.csv", series_csv({"tau", "W_minus_W1", "abs"}, {&t.times, &dev, &absdev}));
    out.json("fit.json", {{"fit", io::to_json(f)},
                          {"w_inf", w1.w_inf},
                          {"spectrum", io::to_json(modes)},
                          {"rate", expect(-qnm->lambda.real(), f.rate)},
                          {"frequency", expect(qnm->lambda.imag(), *f.frequency)}});
    std::printf("figure 8: rate %.6f freq %.6f (pencil %.6f, %.6f)\n", f.rate, *f.frequency, -qnm->lambda.real(),
                qnm->lambda.imag());
}

CriticalResult critical_pair(OutputSink& out)
{
    const PhysParams p(3.5);
    BisectConfig bc;
    bc.evol.N = kOrder;
    CriticalResult r = bisect_critical(even_c_family(), p, 0.0, 1.0, 14, bc);
    std::printf("c_* in [%.17g, %.17g], intermediate %s\n", r.c_lo, r.c_hi, r.intermediate.c_str());
    out.json("critical.json", io::to_json(r));
    return r;
}

void figure9(OutputSink& out)
{
    const CriticalResult r = critical_pair(out);
    for (const auto& [name, run] : {std::pair{"lo", &r.run_lo}, std::pair{"hi", &r.run_hi}}) {
        std::vector<EvolState> snaps{even_c_family().make(name == std::string("lo") ? r.c_lo : r.c_hi, kOrder,
                                                          r.params)};
        for (const EvolState& s : (*run)->checkpoints) snaps.push_back(s);
        out.csv(std::string("snapshots_") + name + ".csv", snapshot_csv(snaps));
    }
}

void figure10(OutputSink& out)
{
    CriticalResult r = critical_pair(out);
    const PhysParams p = r.params;
    const StaticProfile w2 = find_static(p, 2);
    const ChebSeries attractor = to_cheb(w2, 80).resized(kOrder);
    const double gamma = pencil_spectrum(w2, 40).modes.front().lambda.real();
    const PhaseAnalysis a = three_phase_analysis(*r.run_lo, attractor, {}, &*r.run_hi);
    const PhaseAnalysis b = three_phase_analysis(*r.run_hi, attractor, {}, &*r.run_lo);

    const double w2_0 = eval_series(attractor, 0.0);
    const std::size_t j0 = r.run_lo->observation_index(0.0);
    std::vector<double> lo = r.run_lo->field_series(j0), hi = r.run_hi->field_series(j0);
    std::vector<double> lo_dot = r.run_lo->field_dot_series(j0), hi_dot = r.run_hi->field_dot_series(j0);
    const std::size_t n = std::min(lo.size(), hi.size());
    lo.resize(n), hi.resize(n), lo_dot.resize(n), hi_dot.resize(n);
    for (double& v : lo) v -= w2_0;
    for (double& v : hi) v -= w2_0;
    for (double& v : lo_dot) v = std::abs(v);
    for (double& v : hi_dot) v = std::abs(v);
    std::vector<double> times(r.run_lo->times.begin(), r.run_lo->times.begin() + static_cast<std::ptrdiff_t>(n));
    out.csv("phases_x0.csv", series_csv({"tau", "W_minus_W2_lo", "W_minus_W2_hi", "abs_Wdot_lo", "abs_Wdot_hi"},
                                        {&times, &lo, &hi, &lo_dot, &hi_dot}));

    const ScalingResult s = lifetime_scaling(even_c_family(), p, r.c_star(), {1e-8, 1e-9, 1e-10, 1e-11, 1e-12},
                                             attractor, gamma, 0.05, BisectConfig{});
    out.csv("lifetimes.csv", io::lifetime_csv(s.samples));
    const ModeSet w0 = closed_spectrum(StaticKind::ground, p, 0);
    const ModeSet w2_modes = pencil_spectrum(w2, 40);
    std::optional<std::complex<double>> qnm;
    for (const Mode& m : w2_modes.modes) {
        if (m.parity == Parity::even && m.lambda.real() < 0.0 && m.lambda.imag() > 0.0) {
            qnm = m.lambda;
            break;
        }
    }
    json phases = {{"lo", io::to_json(a)}, {"hi", io::to_json(b)}};
    json checks = json::object();
    if (qnm) checks["approach"] = expect(-qnm->real(), a.approach.rate);
    checks["escape"] = expect(gamma, -a.escape.rate);
    checks["ringdown_rate"] = expect(-w0.modes.front().lambda.real(), a.ringdown.rate);
    checks["ringdown_frequency"] = expect(std::abs(w0.modes.front().lambda.imag()), *a.ringdown.frequency);
    checks["lifetime_slope"] = expect(1.0 / gamma, s.slope);
    out.json("phases.json", {{"phases", phases}, {"scaling", io::to_json(s)}, {"checks", checks}});
    std::printf("figure 10: approach %.5f escape %.5f ringdown %.5f/%.5f slope %.5f (1/gamma %.5f)\n",
                a.approach.rate, -a.escape.rate, a.ringdown.rate, *a.ringdown.frequency, s.slope, 1.0 / gamma);
}

void figure11(OutputSink& out)
{
    std::vector<std::size_t> orders;
    for (std::size_t N = 10; N <= 48; N += 2) orders.push_back(N);
    ChebSeries a(50);
    a.at(1) = 2.0;
    a.at(5) = 1.0;
    const auto rows = convergence_experiment(EvolState::at_rest(a, 50, PhysParams(3.5)), orders, 50, 1.0);
    out.csv("convergence.csv", io::convergence_csv(rows));
    std::printf("figure 11: squared L2 difference at tau = 1 against N = 50\n");
    for (const ConvergenceRow& row : rows) std::printf("  N = %2zu  %.3e\n", row.N, row.l2_squared);
}

}  // namespace

int run_figure(const Common& common, int k)
{
    if (k < 1 || k > 11) throw PreconditionError("unknown figure id " + std::to_string(k) + " (expected 1..11)");
    char dir[16];
    std::snprintf(dir, sizeof dir, "figure%02d", k);
    OutputSink out(std::filesystem::path(common.out) / dir, common.command, {{"figure", k}});
    switch (k) {
    case 1: figure1(out); break;
    case 2: figure2(out); break;
    case 3: figure3(out); break;
    case 4: figure4(out); break;
    case 5: figure5(out); break;
    case 6: figure6(out); break;
    case 7: figure7(out); break;
    case 8: figure8(out); break;
    case 9: figure9(out); break;
    case 10: figure10(out); break;
    default: figure11(out); break;
    }
    out.finish();
    return 0;
}

}  // namespace ymwh::cli
