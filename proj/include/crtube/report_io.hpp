#pragma once

#include "crtube/error.hpp"
#include "crtube/harness.hpp"

#include <json.hpp>

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace crtube {

inline constexpr std::array<const char*, 11> csv_columns = {
    "t1", "t2", "v", "w", "rho11", "S", "ma", "theta21_raw", "theta21_norm", "monge_raw", "monge_norm",
};

namespace detail {

inline std::array<double PointRecord::*, 11> record_fields()
{
    return {&PointRecord::t1,    &PointRecord::t2,          &PointRecord::v,
            &PointRecord::w,     &PointRecord::rho11,       &PointRecord::S,
            &PointRecord::ma,    &PointRecord::theta21_raw, &PointRecord::theta21_norm,
            &PointRecord::monge_raw, &PointRecord::monge_norm};
}

inline std::string format17(double x)
{
    std::array<char, 40> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::general, 17);
    return std::string(buf.data(), res.ptr);
}

} // namespace detail

inline nlohmann::json to_json(const PointRecord& r)
{
    nlohmann::json j = nlohmann::json::object();
    const auto fields = detail::record_fields();
    for (std::size_t i = 0; i < fields.size(); ++i) {
        j[csv_columns[i]] = r.*fields[i];
    }
    return j;
}

inline PointRecord record_from_json(const nlohmann::json& j)
{
    PointRecord r;
    const auto fields = detail::record_fields();
    for (std::size_t i = 0; i < fields.size(); ++i) {
        r.*fields[i] = j.at(csv_columns[i]).get<double>();
    }
    return r;
}

inline nlohmann::json to_json(const ResidualReport& report)
{
    nlohmann::json j;
    j["meta"] = report.meta;
    j["points"] = nlohmann::json::array();
    for (const auto& p : report.points) {
        j["points"].push_back(to_json(p));
    }
    j["errors"] = nlohmann::json::array();
    for (const auto& e : report.errors) {
        j["errors"].push_back({{"t1", e.t1}, {"t2", e.t2}, {"kind", e.kind}, {"message", e.message}});
    }
    for (const auto& [name, s] : report.summary) {
        j["summary"][name] = {{"max_abs", s.max_abs}, {"rms", s.rms}};
    }
    j["verdicts"] = report.verdicts;
    j["expected"] = report.expected;
    j["pass"] = report.pass();
    return j;
}

inline void write_json(const ResidualReport& report, std::ostream& os)
{
    os << to_json(report).dump(2) << '\n';
}

inline void write_csv(const ResidualReport& report, std::ostream& os)
{
    for (std::size_t i = 0; i < csv_columns.size(); ++i) {
        os << (i ? "," : "") << csv_columns[i];
    }
    os << '\n';
    const auto fields = detail::record_fields();
    for (const auto& r : report.points) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            os << (i ? "," : "") << detail::format17(r.*fields[i]);
        }
        os << '\n';
    }
}

/// Reads records written by write_csv.
inline std::vector<PointRecord> read_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) {
        throw ConfigError("csv: empty input");
    }
    std::string expected;
    for (std::size_t i = 0; i < csv_columns.size(); ++i) {
        expected += (i ? "," : "") + std::string(csv_columns[i]);
    }
    if (line != expected) {
        throw ConfigError("csv: unexpected header '" + line + "'");
    }
    std::vector<PointRecord> out;
    const auto fields = detail::record_fields();
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty()) {
            continue;
        }
        std::istringstream cells(line);
        std::string cell;
        PointRecord r;
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (!std::getline(cells, cell, ',')) {
                throw ConfigError("csv row " + std::to_string(row) + ": too few columns");
            }
            double x = 0.0;
            const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), x);
            if (ec != std::errc{} || end != cell.data() + cell.size()) {
                throw ConfigError("csv row " + std::to_string(row) + ", column " + csv_columns[i] + ": '" + cell
                                  + "' is not a number");
            }
            r.*fields[i] = x;
        }
        out.push_back(r);
    }
    return out;
}

} // namespace crtube
