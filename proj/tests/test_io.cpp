#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "test_support.hpp"
#include "ymwh/errors.hpp"
#include "ymwh/io.hpp"

using namespace ymwh;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name)
{
    const fs::path d = fs::temp_directory_path() / ("ymwh_io_" + name + "_" + std::to_string(test::seed()));
    fs::remove_all(d);
    return d;
}

}  // namespace

TEST(FormatNumber, RoundTripsAndStaysShort)
{
    std::mt19937_64 rng(test::seed() + 60);
    std::uniform_real_distribution<double> u(-1e6, 1e6);
    for (int i = 0; i < 2000; ++i) {
        const double v = u(rng) * std::pow(10.0, i % 40 - 20);
        EXPECT_EQ(std::strtod(io::format_number(v).c_str(), nullptr), v);
    }
    EXPECT_EQ(io::format_number(0.1), "0.1");
    EXPECT_EQ(io::format_number(3.0), "3");
    EXPECT_EQ(io::format_number(-2.5e-12), "-2.5e-12");
    const double tiny = std::numeric_limits<double>::denorm_min();
    EXPECT_EQ(std::strtod(io::format_number(tiny).c_str(), nullptr), tiny);
}

TEST(Json, SeriesAndStateRoundTrip)
{
    std::mt19937_64 rng(test::seed() + 61);
    const ChebSeries a = test::random_series(rng, 12);
    const ChebSeries ad = test::random_series(rng, 12);
    EXPECT_EQ(io::series_from_json(io::to_json(a)), a);
    const EvolState s(a, ad, 4.25, PhysParams(3.5));
    // through text, as a checkpoint file would be
    const EvolState back = io::state_from_json(nlohmann::json::parse(io::to_json(s).dump()));
    EXPECT_EQ(back.a, a);
    EXPECT_EQ(back.a_dot, ad);
    EXPECT_EQ(back.tau, 4.25);
    EXPECT_EQ(back.params.ell(), 3.5);

    nlohmann::json no_velocity = io::to_json(s);
    no_velocity.erase("a_dot");
    EXPECT_EQ(io::state_from_json(no_velocity).a_dot.max_abs(), 0.0);
    EXPECT_THROW(io::state_from_json(nlohmann::json{{"tau", 0.0}}), PreconditionError);
    EXPECT_THROW(io::series_from_json(nlohmann::json{{"x", 1}}), PreconditionError);
}

TEST(Json, FitAndModeSummaries)
{
    FitResult f;
    f.model = FitModel::ringdown;
    f.rate = 0.5;
    f.frequency = 2.0;
    const nlohmann::json j = io::to_json(f);
    EXPECT_EQ(j.at("model"), "ringdown");
    EXPECT_EQ(j.at("rate"), 0.5);
    EXPECT_EQ(j.at("frequency"), 2.0);

    const nlohmann::json m = io::to_json(closed_spectrum(StaticKind::star, PhysParams(1.5), 1));
    EXPECT_EQ(m.at("unstable_count"), 2);
    EXPECT_EQ(m.at("modes").size(), 4u);
    EXPECT_EQ(m.at("modes")[0].at("re"), 1.5);
    EXPECT_EQ(m.at("modes")[0].at("source"), "closed_form");
}

TEST(Json, StaticProfileSummary)
{
    const StaticProfile w = find_static(PhysParams(2.5), 1);
    const nlohmann::json j = io::to_json(w);
    EXPECT_EQ(j.at("label"), "W1");
    EXPECT_EQ(j.at("parity"), "odd");
    EXPECT_EQ(j.at("shoot"), w.shoot);
    EXPECT_TRUE(j.contains("residuals"));
    EXPECT_FALSE(io::to_json(star_profile(PhysParams(2.5))).contains("residuals"));
    const std::string csv = io::profile_csv(w);
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "r,W,Wprime");
    EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), w.r.size() + 1);
}

TEST(Csv, TrajectoryColumnsFollowTheRecordedSeries)
{
    EvolConfig c;
    c.N = 6;
    c.tau_end = 0.2;
    c.stride = 0.1;
    c.coefficients = {0, 2};
    c.observation_points = {0.0};
    c.checkpoint_interval = 0.0;
    const Trajectory t = evolve(EvolState::at_rest(ChebSeries::unit(2, 6, 0.3), 6, PhysParams(1.5)), c);
    const std::string csv = io::trajectory_csv(t);
    std::istringstream in(csv);
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "tau,a0,a2,W(0),Wdot(0),energy,flux_left,flux_right,kinetic,radiated");
    EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), t.times.size() + 1);
    const nlohmann::json meta = io::trajectory_metadata(t);
    EXPECT_EQ(meta.at("N"), 6);
    EXPECT_EQ(io::lifetime_csv({{1e-8, 20.5}}), "offset,lifetime\n1e-08,20.5\n");
    EXPECT_EQ(io::convergence_csv({{10, 0.25}}), "N,l2_squared\n10,0.25\n");
}

TEST(Files, WriteCreatesDirectoriesAndReadBackMatches)
{
    const fs::path d = scratch_dir("files");
    const nlohmann::json j = {{"x", 1.5}, {"v", {1, 2, 3}}};
    io::write_json(d / "a" / "b.json", j);
    EXPECT_EQ(io::read_json(d / "a" / "b.json"), j);
    io::write_text(d / "t.txt", "hello\n");
    std::ifstream in(d / "t.txt");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "hello");
    EXPECT_THROW(io::read_json(d / "missing.json"), PreconditionError);
    io::write_text(d / "bad.json", "{not json");
    EXPECT_THROW(io::read_json(d / "bad.json"), PreconditionError);
    fs::remove_all(d);
}
