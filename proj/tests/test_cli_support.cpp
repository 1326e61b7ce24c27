#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "support.hpp"
#include "ymwh/errors.hpp"
#include "ymwh/io.hpp"

using namespace ymwh;
using namespace ymwh::cli;

TEST(CoefficientMap, ParsesPairs)
{
    const auto m = parse_coefficient_map("1:2, 5:1,0:-0.5");
    ASSERT_EQ(m.size(), 3u);
    EXPECT_EQ(m.at(1), 2.0);
    EXPECT_EQ(m.at(5), 1.0);
    EXPECT_EQ(m.at(0), -0.5);
    const ChebSeries s = series_from_map(m, 3);
    EXPECT_EQ(s.order(), 5u);
    EXPECT_EQ(s[5], 1.0);
    EXPECT_EQ(series_from_map(m, 10).order(), 10u);
}

TEST(CoefficientMap, RejectsMalformedInput)
{
    for (const char* bad : {"1:2,1:3", "1", "a:2", "1:x", "-1:2", "1:2:3", ""}) {
        EXPECT_THROW(parse_coefficient_map(bad), PreconditionError) << bad;
    }
}

TEST(NumberList, ItemsAndInclusiveRanges)
{
    EXPECT_EQ(parse_number_list("1,2.5"), (std::vector<double>{1.0, 2.5}));
    const auto r = parse_number_list("0:1:0.25,3");
    ASSERT_EQ(r.size(), 6u);
    EXPECT_DOUBLE_EQ(r[4], 1.0);
    EXPECT_EQ(r[5], 3.0);
    EXPECT_EQ(parse_index_list("10:16:2"), (std::vector<std::size_t>{10, 12, 14, 16}));
    EXPECT_THROW(parse_number_list("1,,2"), PreconditionError);
    EXPECT_THROW(parse_number_list("0:1:0"), PreconditionError);
    EXPECT_THROW(parse_index_list("1.5"), PreconditionError);
}

TEST(Range, Parses)
{
    EXPECT_EQ(parse_range("0:1"), (std::pair<double, double>{0.0, 1.0}));
    EXPECT_THROW(parse_range("1:0"), PreconditionError);
    EXPECT_THROW(parse_range("1"), PreconditionError);
}

TEST(Families, LookupByName)
{
    for (const std::string& name : family_names()) EXPECT_EQ(family_by_name(name).name, name);
    EXPECT_EQ(family_names().size(), 3u);
    EXPECT_THROW(family_by_name("none"), PreconditionError);
}

TEST(OutputSink, TagsFilesAndWritesProvenance)
{
    namespace fs = std::filesystem;
    const fs::path d = fs::temp_directory_path() / "ymwh_sink_test";
    fs::remove_all(d);
    OutputSink sink(d, "ymwh test --x 1", {{"x", 1}});
    sink.csv("a.csv", "c\n1\n");
    sink.json("b.json", {{"v", 2}});
    sink.finish();
    std::ifstream in(d / "a.csv");
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "# ymwh test --x 1");
    EXPECT_EQ(io::read_json(d / "b.json").at("command"), "ymwh test --x 1");
    const auto prov = io::read_json(d / "provenance.json");
    EXPECT_EQ(prov.at("files").size(), 2u);
    EXPECT_EQ(prov.at("parameters").at("x"), 1);
    for (const char* key : {"tool", "version", "started_utc", "finished_utc", "libraries", "compiler"}) {
        EXPECT_TRUE(prov.contains(key)) << key;
    }
    EXPECT_EQ(utc_timestamp().back(), 'Z');
    fs::remove_all(d);
}
