#include "lqw/report.hpp"

#include <charconv>
#include <ctime>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "lqw/errors.hpp"
#include "lqw/rng.hpp"

namespace lqw {

namespace {

std::string iso8601(std::chrono::system_clock::time_point tp) {
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm utc{};
    gmtime_r(&t, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep)) out.push_back(field);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

template <class T>
T parse_number(const std::string& text, const char* column) {
    T value{};
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        throw DomainError(std::string("bad value '") + text + "' in column " + column);
    }
    return value;
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ec == std::errc{} ? ptr : buf);
}

void write_trace_csv(std::ostream& out, const ProbabilityTrace& trace) {
    out << "step,probability\n";
    for (std::size_t t = 0; t < trace.size(); ++t) out << t << ',' << format_double(trace[t]) << '\n';
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
    out << "na,peak_step,peak_probability,optimal\n";
    for (const auto& r : rows) {
        out << format_double(r.na) << ',' << r.peak_step << ',' << format_double(r.peak_probability)
            << ',' << (r.optimal ? 1 : 0) << '\n';
    }
}

void write_records_csv(std::ostream& out, const std::vector<ScalingRecord>& records) {
    out << "side,n_elements,m,na,mode,seed,trial,peak_step,peak_probability,amplified_cost\n";
    for (const auto& r : records) {
        out << r.side << ',' << r.n_elements << ',' << r.m << ',' << format_double(r.na) << ','
            << to_string(r.mode) << ',' << r.seed << ',' << r.trial << ',' << r.peak_step << ','
            << format_double(r.peak_probability) << ',' << format_double(r.amplified_cost) << '\n';
    }
}

void write_density_summary_csv(std::ostream& out, const std::vector<DensitySummary>& rows) {
    out << "side,m,trials,fixed_step,mean_fixed_step_probability,mean_peak_probability,"
           "mean_peak_step\n";
    for (const auto& s : rows) {
        out << s.side << ',' << s.m << ',' << s.trials << ',' << s.fixed_step << ','
            << format_double(s.mean_fixed_step_probability) << ','
            << format_double(s.mean_peak_probability) << ',' << format_double(s.mean_peak_step)
            << '\n';
    }
}

std::vector<ScalingRecord> read_records_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DomainError("records file is empty");
    std::map<std::string, std::size_t> column;
    const auto header = split(line, ',');
    for (std::size_t i = 0; i < header.size(); ++i) column[header[i]] = i;
    static constexpr const char* kRequired[] = {"side", "n_elements", "m",
                                                "na", "mode", "seed",
                                                "trial", "peak_step", "peak_probability",
                                                "amplified_cost"};
    for (const char* name : kRequired) {
        if (!column.contains(name)) throw DomainError(std::string("records file lacks column ") + name);
    }

    std::vector<ScalingRecord> records;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto fields = split(line, ',');
        if (fields.size() != header.size()) {
            throw DomainError("records row " + std::to_string(row) + " has " +
                              std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(header.size()));
        }
        auto get = [&](const char* name) -> const std::string& { return fields[column[name]]; };
        ScalingRecord r;
        r.side = parse_number<std::int64_t>(get("side"), "side");
        r.n_elements = parse_number<std::int64_t>(get("n_elements"), "n_elements");
        r.m = parse_number<std::int64_t>(get("m"), "m");
        r.na = parse_number<double>(get("na"), "na");
        r.mode = parse_edge_mode(get("mode"));
        r.seed = parse_number<std::uint64_t>(get("seed"), "seed");
        r.trial = parse_number<int>(get("trial"), "trial");
        r.peak_step = parse_number<std::int64_t>(get("peak_step"), "peak_step");
        r.peak_probability = parse_number<double>(get("peak_probability"), "peak_probability");
        r.amplified_cost = parse_number<double>(get("amplified_cost"), "amplified_cost");
        records.push_back(r);
    }
    return records;
}

std::vector<FitPoint> fit_points(const std::vector<ScalingRecord>& records) {
    std::vector<FitPoint> points;
    points.reserve(records.size());
    for (const auto& r : records) {
        points.push_back({r.n_elements, r.m, static_cast<double>(r.peak_step)});
    }
    return points;
}

nlohmann::json fit_to_json(const FitResult& fit) {
    return {
        {"model", std::string(to_string(fit.model.kind))},
        {"coefficient", fit.coefficient},
        {"rms_relative_residual", fit.rms_relative_residual},
        {"points", fit.points},
        {"log_base", fit.model.log_base_name()},
    };
}

nlohmann::json RunManifest::to_json() const {
    return {
        {"command", command},
        {"parameters", parameters},
        {"seed", seed},
        {"prng", std::string(kPrngId)},
        {"engine_version", kEngineVersion},
        {"started", iso8601(started)},
        {"finished", iso8601(finished)},
        {"workers", workers},
        {"outputs", outputs},
    };
}

std::string manifest_path_for(const std::string& output_path) {
    return output_path + ".manifest.json";
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest " + path);
    out << manifest.to_json().dump(2) << '\n';
}

}  // namespace lqw
