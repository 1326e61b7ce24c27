#include "support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <sstream>

#include <Eigen/Core>
#include <boost/version.hpp>

#include "ymwh/errors.hpp"
#include "ymwh/io.hpp"

#ifndef YMWH_VERSION
#define YMWH_VERSION "unknown"
#endif

namespace ymwh::cli {

namespace {

std::vector<std::string> split(const std::string& text, char sep)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) out.push_back(item);
    if (!text.empty() && text.back() == sep) out.emplace_back();
    return out;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& s, const std::string& context)
{
    const std::string t = trim(s);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (t.empty() || used != t.size() || !std::isfinite(v)) {
        throw PreconditionError(context + ": '" + s + "' is not a finite number");
    }
    return v;
}

std::size_t to_index(const std::string& s, const std::string& context)
{
    const double v = to_double(s, context);
    if (v < 0.0 || v != std::floor(v) || v > 1e9) {
        throw PreconditionError(context + ": '" + s + "' is not a nonnegative integer");
    }
    return static_cast<std::size_t>(v);
}

}  // namespace

std::map<std::size_t, double> parse_coefficient_map(const std::string& text)
{
    std::map<std::size_t, double> map;
    for (const std::string& item : split(text, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() != 2) throw PreconditionError("coefficient map: expected n:value, got '" + item + "'");
        const std::size_t n = to_index(parts[0], "coefficient map");
        if (!map.emplace(n, to_double(parts[1], "coefficient map")).second) {
            throw PreconditionError("coefficient map: index " + std::to_string(n) + " given twice");
        }
    }
    if (map.empty()) throw PreconditionError("coefficient map is empty");
    return map;
}

ChebSeries series_from_map(const std::map<std::size_t, double>& map, std::size_t order)
{
    const std::size_t top = map.empty() ? 0 : map.rbegin()->first;
    ChebSeries s(std::max(order, top));
    for (const auto& [n, v] : map) s.at(n) = v;
    return s;
}

std::vector<double> parse_number_list(const std::string& text)
{
    std::vector<double> out;
    for (const std::string& item : split(text, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() == 1) {
            out.push_back(to_double(parts[0], "number list"));
        } else if (parts.size() == 3) {
            const double lo = to_double(parts[0], "number list");
            const double hi = to_double(parts[1], "number list");
            const double step = to_double(parts[2], "number list");
            if (!(step > 0.0) || hi < lo) throw PreconditionError("number list: bad range '" + item + "'");
            const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step + 1e-9));
            if (count > 1000000) throw PreconditionError("number list: range '" + item + "' is too long");
            for (std::size_t k = 0; k <= count; ++k) out.push_back(lo + static_cast<double>(k) * step);
        } else {
            throw PreconditionError("number list: expected v or lo:hi:step, got '" + item + "'");
        }
    }
    if (out.empty()) throw PreconditionError("number list is empty");
    return out;
}

std::vector<std::size_t> parse_index_list(const std::string& text)
{
    std::vector<std::size_t> out;
    for (double v : parse_number_list(text)) out.push_back(to_index(io::format_number(v), "index list"));
    return out;
}

std::pair<double, double> parse_range(const std::string& text)
{
    const auto parts = split(text, ':');
    if (parts.size() != 2) throw PreconditionError("range: expected lo:hi, got '" + text + "'");
    const double lo = to_double(parts[0], "range");
    const double hi = to_double(parts[1], "range");
    if (!(lo < hi)) throw PreconditionError("range: need lo < hi in '" + text + "'");
    return {lo, hi};
}

Family family_by_name(const std::string& name)
{
    if (name == "even-c") return even_c_family();
    if (name == "symmetric-even") return symmetric_even_family();
    if (name == "odd-c") return odd_c_family();
    throw PreconditionError("unknown family '" + name + "' (expected even-c, symmetric-even or odd-c)");
}

std::vector<std::string> family_names() { return {"even-c", "symmetric-even", "odd-c"}; }

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

OutputSink::OutputSink(std::filesystem::path dir, std::string command, nlohmann::json parameters)
    : dir_(std::move(dir)), command_(std::move(command)), parameters_(std::move(parameters)), started_(utc_timestamp())
{
    std::filesystem::create_directories(dir_);
}

void OutputSink::csv(const std::string& name, const std::string& body)
{
    io::write_text(dir_ / name, "# " + command_ + "\n" + body);
    files_.push_back(name);
}

void OutputSink::json(const std::string& name, nlohmann::json body)
{
    if (body.is_object()) body["command"] = command_;
    io::write_json(dir_ / name, body);
    files_.push_back(name);
}

void OutputSink::finish()
{
    nlohmann::json p = {
        {"tool", "ymwh"},
        {"version", YMWH_VERSION},
        {"command", command_},
        {"parameters", parameters_},
        {"files", files_},
        {"started_utc", started_},
        {"finished_utc", utc_timestamp()},
        {"libraries",
         {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"boost", std::to_string(BOOST_VERSION / 100000) + "." + std::to_string(BOOST_VERSION / 100 % 1000) + "." +
                        std::to_string(BOOST_VERSION % 100)},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}},
#if defined(__VERSION__)
        {"compiler", __VERSION__},
#endif
    };
    io::write_json(dir_ / "provenance.json", p);
}

}  // namespace ymwh::cli
