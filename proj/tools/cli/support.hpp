#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ymwh/chebyshev.hpp"
#include "ymwh/dynamics.hpp"

namespace ymwh::cli {

/// "1:2,5:1" -> {1: 2.0, 5: 1.0}. Rejects duplicate indices and malformed
/// pairs with PreconditionError.
std::map<std::size_t, double> parse_coefficient_map(const std::string& text);

/// Series of the given order (at least the largest index) from a map.
ChebSeries series_from_map(const std::map<std::size_t, double>& map, std::size_t order);

/// Comma-separated numbers; every item may also be a range "lo:hi:step"
/// with inclusive hi.
std::vector<double> parse_number_list(const std::string& text);
std::vector<std::size_t> parse_index_list(const std::string& text);

/// "lo:hi" -> (lo, hi) with lo < hi.
std::pair<double, double> parse_range(const std::string& text);

/// Families reachable from the command line: even-c, symmetric-even, odd-c.
Family family_by_name(const std::string& name);
std::vector<std::string> family_names();

std::string utc_timestamp();

/// Collects the files of one command run under a directory. CSV files get a
/// leading comment line with the canonical command, JSON objects a
/// "command" member, so each data file names the run that produced it.
/// finish() writes provenance.json next to them.
class OutputSink {
public:
    OutputSink(std::filesystem::path dir, std::string command, nlohmann::json parameters);

    const std::filesystem::path& dir() const noexcept { return dir_; }
    const std::string& command() const noexcept { return command_; }

    void csv(const std::string& name, const std::string& body);
    void json(const std::string& name, nlohmann::json body);
    void finish();

private:
    std::filesystem::path dir_;
    std::string command_;
    nlohmann::json parameters_;
    std::string started_;
    std::vector<std::string> files_;
};

}  // namespace ymwh::cli
