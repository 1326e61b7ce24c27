#pragma once

#include <cstddef>
#include <optional>
#include <string>

namespace ymwh::cli {

/// Options shared by every subcommand. Unset values take the command's own
/// default.
struct Common {
    std::optional<double> ell;
    std::optional<std::size_t> N;
    std::optional<double> rtol;
    std::optional<double> atol;
    std::optional<double> tau_end;
    std::optional<double> stride;
    std::string out = "out";
    /// Canonical command line recorded in every output file.
    std::string command;
};

struct StaticArgs {
    std::optional<int> n;
    bool all = false;
    /// lo:hi:step list of couplings for the bifurcation table.
    std::optional<std::string> sweep;
};

struct SpectrumArgs {
    std::string background;
    std::size_t M = 40;
    int j_max = 12;
    double margin = 1e-6;
};

struct EvolveArgs {
    std::optional<std::string> data;
    std::optional<std::string> state;
    std::string observe = "-1,0,1";
    std::string coefficients = "all";
    bool fixed_rk4 = false;
    double dt = 0.0;
    double checkpoint_interval = 5.0;
    bool no_energy = false;
};

struct BisectArgs {
    std::string family = "even-c";
    std::string range = "0:1";
    int digits = 14;
    double tau_max = 600.0;
    bool phases = false;
    bool lifetimes = false;
    std::string offsets = "1e-8,1e-9,1e-10,1e-11,1e-12";
    double delta = 0.05;
};

struct ConvergeArgs {
    std::string data = "1:2,5:1";
    std::string orders = "10,20,30,40,50";
    std::optional<std::size_t> reference;
    double tau = 1.0;
};

int run_static(const Common& common, const StaticArgs& args);
int run_spectrum(const Common& common, const SpectrumArgs& args);
int run_evolve(const Common& common, const EvolveArgs& args);
int run_bisect(const Common& common, const BisectArgs& args);
int run_converge(const Common& common, const ConvergeArgs& args);

/// Canonical pipeline behind figure k of the figure matrix (k = 1..11).
int run_figure(const Common& common, int k);

}  // namespace ymwh::cli
