#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "etc/simulation.hpp"
#include "etc/synthesis.hpp"

namespace etc {

using Json = nlohmann::json;

/// Parse or schema failure; line and column are 1-based, zero when unknown.
struct ConfigError : std::runtime_error {
    ConfigError(const std::string& what, std::size_t l = 0, std::size_t c = 0)
        : std::runtime_error(what), line(l), column(c) {}
    std::size_t line;
    std::size_t column;
};

Json parse_json_text(const std::string& text);
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

Scenario scenario_from_json(const Json& j);
Json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::filesystem::path& path);

/// 64-bit FNV-1a of the canonical serialization, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);
std::string scenario_digest(const Scenario& s);

/// The shipped 10-spacecraft scenario with the self-consistent scalar set.
Json default_scenario_json();

/// The same scenario carrying the literal published scalar table.
Json published_table_scenario_json();

Json gains_to_json(const GainSet& g);
GainSet gains_from_json(const Json& j);
GainSet load_gains(const std::filesystem::path& path);

Json report_to_json(const VerificationReport& r);
Json metrics_to_json(const Metrics& m);
std::string format_report(const VerificationReport& r);

void write_trace_csv(const std::filesystem::path& path, const TimeSeries& ts);

/// Re-reads a trace and checks the header and row shape; returns row count.
std::size_t check_trace_csv(const std::filesystem::path& path, int state_dim, int input_dim);

std::vector<std::string> trace_columns(int state_dim, int input_dim);

}  // namespace etc
