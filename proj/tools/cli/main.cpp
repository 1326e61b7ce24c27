#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "ymwh/errors.hpp"

namespace {

// Options that were set on the command line or by the config file, in
// declaration order, as "--name value" pairs.
std::string canonical_options(const CLI::App& app)
{
    std::string out;
    for (const CLI::Option* opt : app.get_options()) {
        if (opt->count() == 0 || opt->get_lnames().empty()) continue;
        const std::string name = opt->get_lnames().front();
        if (name == "help" || name == "config" || name == "out") continue;
        for (const std::string& value : opt->results()) {
            // flags record "true"
            out += " --" + name + (value == "true" ? "" : " " + value);
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    using namespace ymwh::cli;

    CLI::App app{"Galerkin evolution, static solutions and critical dynamics of the wormhole Yang-Mills model"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key=value file setting option defaults; [command] sections are supported");

    Common common;
    app.add_option("--ell", common.ell, "Coupling ell (ell(ell+1) = 1/alpha^2)");
    app.add_option("--N", common.N, "Galerkin truncation order");
    app.add_option("--rtol", common.rtol, "Relative tolerance of the time integrator");
    app.add_option("--atol", common.atol, "Absolute tolerance of the time integrator");
    app.add_option("--tau-end", common.tau_end, "Final time of the evolution");
    app.add_option("--stride", common.stride, "Spacing of recorded samples");
    app.add_option("--out", common.out, "Output directory")->envname("YMWH_OUTPUT_DIR")->capture_default_str();

    StaticArgs st;
    auto* cmd_static = app.add_subcommand("static", "Static solutions, energies and the bifurcation table");
    cmd_static->add_option("--n", st.n, "Single solution W_n (0 selects W_0)");
    cmd_static->add_flag("--all", st.all, "Every static solution at this coupling plus the bifurcation table");
    cmd_static->add_option("--sweep", st.sweep, "Couplings lo:hi:step for the bifurcation table (with --all, defaults to 0.05:ell:0.05)");

    SpectrumArgs sp;
    auto* cmd_spectrum = app.add_subcommand("spectrum", "Linear modes about a static solution");
    cmd_spectrum->add_option("--bg", sp.background, "Background: star, ground or w<n>")->required();
    cmd_spectrum->add_option("--M", sp.M, "Chebyshev order of the pencil")->capture_default_str();
    cmd_spectrum->add_option("--jmax", sp.j_max, "Largest closed-form index j")->capture_default_str();
    cmd_spectrum->add_option("--margin", sp.margin, "Relative agreement required between pencil orders")
        ->capture_default_str();

    EvolveArgs ev;
    auto* cmd_evolve = app.add_subcommand("evolve", "Evolve initial data with the Galerkin system");
    cmd_evolve->add_option("--data", ev.data, "Rest initial data as n:value pairs, e.g. 1:2,5:1");
    cmd_evolve->add_option("--state", ev.state, "Initial state JSON file {tau, ell, a, a_dot}");
    cmd_evolve->add_option("--observe", ev.observe, "Observation points x (or none)")->capture_default_str();
    cmd_evolve->add_option("--coeffs", ev.coefficients, "Recorded coefficient indices (or all)")
        ->capture_default_str();
    cmd_evolve->add_flag("--fixed-rk4", ev.fixed_rk4, "Fixed-step RK4 instead of adaptive RKF78");
    cmd_evolve->add_option("--dt", ev.dt, "Fixed step (0 selects 0.5/N^2)")->capture_default_str();
    cmd_evolve->add_option("--checkpoint-interval", ev.checkpoint_interval, "Time between state checkpoints (0: none)")
        ->capture_default_str();
    cmd_evolve->add_flag("--no-energy", ev.no_energy, "Skip energy and flux recording");

    BisectArgs bi;
    auto* cmd_bisect = app.add_subcommand("bisect", "Bisect a family of initial data on the endstate");
    cmd_bisect->add_option("--family", bi.family, "even-c, symmetric-even or odd-c")->capture_default_str();
    cmd_bisect->add_option("--range", bi.range, "Initial bracket lo:hi")->capture_default_str();
    cmd_bisect->add_option("--digits", bi.digits, "Relative digits of the bracket")->capture_default_str();
    cmd_bisect->add_option("--tau-max", bi.tau_max, "Probes undecided by this time fail")->capture_default_str();
    cmd_bisect->add_flag("--phases", bi.phases, "Fit approach, escape and ringdown of the final pair");
    cmd_bisect->add_flag("--lifetimes", bi.lifetimes, "Measure lifetime scaling near c_*");
    cmd_bisect->add_option("--offsets", bi.offsets, "Offsets c - c_* for the lifetimes")->capture_default_str();
    cmd_bisect->add_option("--delta", bi.delta, "L2 radius of the attractor neighbourhood")->capture_default_str();

    ConvergeArgs cv;
    auto* cmd_converge = app.add_subcommand("converge", "Squared L2 difference against a reference order");
    cmd_converge->add_option("--data", cv.data, "Rest initial data as n:value pairs")->capture_default_str();
    cmd_converge->add_option("--N", cv.orders, "Orders to compare, e.g. 10,20,30,40,50")->capture_default_str();
    cmd_converge->add_option("--ref", cv.reference, "Reference order (default: the largest in --N)");
    cmd_converge->add_option("--tau", cv.tau, "Comparison time")->capture_default_str();

    int figure = 0;
    auto* cmd_figure = app.add_subcommand("figure", "Data behind one figure of the reproduction matrix");
    cmd_figure->add_option("k", figure, "Figure id 1..11")->required();

    for (CLI::App* sub : app.get_subcommands({})) sub->configurable();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    CLI::App* sub = app.get_subcommands().front();
    common.command = "ymwh " + sub->get_name() + canonical_options(app) + canonical_options(*sub);
    if (sub == cmd_figure) common.command = "ymwh figure " + std::to_string(figure);

    try {
        if (sub == cmd_static) return run_static(common, st);
        if (sub == cmd_spectrum) return run_spectrum(common, sp);
        if (sub == cmd_evolve) return run_evolve(common, ev);
        if (sub == cmd_bisect) return run_bisect(common, bi);
        if (sub == cmd_converge) return run_converge(common, cv);
        return run_figure(common, figure);
    } catch (const ymwh::PreconditionError& e) {
        std::fprintf(stderr, "ymwh: error: %s\n", e.what());
        return 2;
    } catch (const ymwh::NumericalError& e) {
        std::fprintf(stderr, "ymwh: numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "ymwh: %s\n", e.what());
        return 1;
    }
}
