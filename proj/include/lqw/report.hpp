#pragma once

// CSV and JSON emission. CSV: header row, comma separator, '.' decimal point,
// LF line endings, no footer.

#include <chrono>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "lqw/experiments.hpp"
#include "lqw/fitting.hpp"
#include "lqw/walk.hpp"

namespace lqw {

inline constexpr const char* kEngineVersion = "0.1.0";

/// Shortest decimal text that reads back to the same double.
std::string format_double(double value);

void write_trace_csv(std::ostream& out, const ProbabilityTrace& trace);
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
void write_records_csv(std::ostream& out, const std::vector<ScalingRecord>& records);
void write_density_summary_csv(std::ostream& out, const std::vector<DensitySummary>& rows);

/// Parses the records schema written by write_records_csv. Column order is
/// taken from the header; throws DomainError on missing columns or bad rows.
std::vector<ScalingRecord> read_records_csv(std::istream& in);

std::vector<FitPoint> fit_points(const std::vector<ScalingRecord>& records);

nlohmann::json fit_to_json(const FitResult& fit);

/// Header of every output file: what ran, with which parameters.
struct RunManifest {
    std::string command;
    nlohmann::json parameters = nlohmann::json::object();
    std::uint64_t seed = 0;
    int workers = 1;
    std::chrono::system_clock::time_point started;
    std::chrono::system_clock::time_point finished;
    std::vector<std::string> outputs;

    nlohmann::json to_json() const;
};

/// "<output>.manifest.json"
std::string manifest_path_for(const std::string& output_path);

void write_manifest(const std::string& path, const RunManifest& manifest);

}  // namespace lqw
