#include "lqw/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "lqw/errors.hpp"
#include "lqw/experiments.hpp"
#include "lqw/fitting.hpp"
#include "lqw/parallel.hpp"
#include "lqw/report.hpp"
#include "lqw/walk.hpp"

namespace lqw {

namespace {

std::int64_t parse_int(const std::string& text, const std::string& what) {
    std::size_t used = 0;
    std::int64_t value = 0;
    try {
        value = std::stoll(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) throw DomainError("bad " + what + " '" + text + "'");
    return value;
}

std::vector<std::int64_t> parse_int_list(const std::string& text, const std::string& what) {
    std::vector<std::int64_t> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(parse_int(item, what));
    if (out.empty()) throw DomainError("empty " + what + " list");
    return out;
}

std::optional<ExceptionalRule> parse_exclude(const std::string& text) {
    if (text == "none") return std::nullopt;
    return parse_exceptional_rule(text);
}

std::optional<std::int64_t> parse_steps(const std::string& text) {
    if (text == "auto") return std::nullopt;
    const auto steps = parse_int(text, "step count");
    if (steps < 0) throw DomainError("step count must be nonnegative");
    return steps;
}

nlohmann::json targets_json(const std::vector<GridVertex>& targets) {
    auto arr = nlohmann::json::array();
    for (const auto& t : targets) arr.push_back({t.x, t.y});
    return arr;
}

/// Writes to the --out path, or to the caller's stream for "-".
class Output {
public:
    Output(const std::string& path, std::ostream& fallback) : path_(path), stream_(&fallback) {
        if (path_ != "-") {
            file_.open(path_, std::ios::binary);
            if (!file_) throw std::runtime_error("cannot open output " + path_);
            stream_ = &file_;
        }
    }

    std::ostream& stream() { return *stream_; }
    bool is_file() const { return path_ != "-"; }
    const std::string& path() const { return path_; }

private:
    std::string path_;
    std::ofstream file_;
    std::ostream* stream_;
};

struct Common {
    std::string out = "-";
    int workers = workers_from_env(1);
    bool quiet = false;
};

void add_common(CLI::App* cmd, Common& common) {
    cmd->add_option("--out", common.out, "Output path, '-' for stdout")->capture_default_str();
    cmd->add_option("--workers", common.workers,
                    "Worker threads (default from LQW_WORKERS, else 1)")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--quiet", common.quiet, "Suppress progress lines");
}

class Session {
public:
    Session(std::string command, const Common& common, std::ostream& err)
        : common_(common), err_(err) {
        manifest_.command = std::move(command);
        manifest_.workers = common.workers;
        manifest_.started = std::chrono::system_clock::now();
    }

    nlohmann::json& params() { return manifest_.parameters; }
    void set_seed(std::uint64_t seed) { manifest_.seed = seed; }

    std::function<void(std::size_t, std::size_t)> progress() {
        if (common_.quiet) return {};
        return [this](std::size_t done, std::size_t total) {
            err_ << "[" << manifest_.command << "] " << done << "/" << total << " runs\n";
        };
    }

    void finish(const std::vector<std::string>& outputs) {
        if (outputs.empty()) return;
        manifest_.finished = std::chrono::system_clock::now();
        manifest_.outputs = outputs;
        write_manifest(manifest_path_for(outputs.front()), manifest_);
    }

private:
    RunManifest manifest_;
    const Common& common_;
    std::ostream& err_;
};

std::vector<std::string> file_outputs(const Output& out) {
    if (!out.is_file()) return {};
    return {out.path()};
}

}  // namespace

std::vector<GridVertex> parse_targets(const std::string& text) {
    std::vector<GridVertex> targets;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ';')) {
        if (item.empty()) continue;
        const auto comma = item.find(',');
        if (comma == std::string::npos || item.find(',', comma + 1) != std::string::npos) {
            throw DomainError("malformed target '" + item + "' (expected x,y)");
        }
        targets.push_back({parse_int(item.substr(0, comma), "target coordinate"),
                           parse_int(item.substr(comma + 1), "target coordinate")});
    }
    if (targets.empty()) throw DomainError("no targets given");
    return targets;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lackadaisical quantum-walk search on a 2-D grid with HN4 long-range edges", "lqw"};
    app.require_subcommand(1);

    // simulate
    Common sim_common;
    std::int64_t sim_side = 0;
    std::string sim_targets;
    double sim_na = 0.0;
    std::string sim_mode = "hn4";
    std::string sim_steps = "auto";
    std::uint64_t sim_seed = 0;
    auto* simulate = app.add_subcommand("simulate", "Evolve one walk and write the P(t) trace");
    simulate->add_option("--side", sim_side, "Grid side (power of two)")->required();
    simulate->add_option("--targets", sim_targets, "Targets \"x1,y1;x2,y2;...\" (0-based)")->required();
    simulate->add_option("--na", sim_na, "Total self-loop weight N*a")->required();
    simulate->add_option("--mode", sim_mode, "hn4|grid")->capture_default_str();
    simulate->add_option("--steps", sim_steps, "auto|INT")->capture_default_str();
    simulate->add_option("--seed", sim_seed, "Recorded in the manifest")->capture_default_str();
    add_common(simulate, sim_common);

    // sweep
    Common sw_common;
    std::int64_t sw_side = 0;
    std::string sw_targets;
    std::int64_t sw_m = 0;
    std::uint64_t sw_seed = 1;
    std::string sw_exclude = "line";
    double sw_min = 1.0, sw_max = 30.0, sw_step = 0.5;
    std::string sw_mode = "hn4";
    std::string sw_steps = "auto";
    auto* sweep = app.add_subcommand("sweep", "First-peak probability over a range of Na");
    sweep->add_option("--side", sw_side, "Grid side (power of two)")->required();
    auto* sw_targets_opt = sweep->add_option("--targets", sw_targets, "Targets \"x,y;...\"");
    sweep->add_option("--m", sw_m, "Draw this many random targets instead")->excludes(sw_targets_opt);
    sweep->add_option("--seed", sw_seed, "Seed for random targets")->capture_default_str();
    sweep->add_option("--exclude", sw_exclude, "line|intersection|none")->capture_default_str();
    sweep->add_option("--na-min", sw_min)->capture_default_str();
    sweep->add_option("--na-max", sw_max)->capture_default_str();
    sweep->add_option("--na-step", sw_step)->capture_default_str();
    sweep->add_option("--mode", sw_mode, "hn4|grid")->capture_default_str();
    sweep->add_option("--steps", sw_steps, "auto|INT")->capture_default_str();
    add_common(sweep, sw_common);

    // scale
    Common sc_common;
    std::string sc_sides = "64,128,256,512";
    std::int64_t sc_m = 1;
    std::string sc_m_list;
    int sc_trials = 10;
    std::string sc_na;
    std::string sc_na_rule;
    std::string sc_mode = "hn4";
    std::uint64_t sc_seed = 1;
    std::string sc_exclude = "line";
    std::string sc_targets;
    std::int64_t sc_reference = 16;
    std::string sc_steps = "auto";
    auto* scale = app.add_subcommand("scale", "First-peak records over lattice sizes and M");
    scale->add_option("--sides", sc_sides, "Comma-separated sides")->capture_default_str();
    auto* sc_m_opt = scale->add_option("--m", sc_m, "Targets per run")->capture_default_str();
    scale->add_option("--m-list", sc_m_list, "Comma-separated target counts")->excludes(sc_m_opt);
    scale->add_option("--trials", sc_trials)->capture_default_str()->check(CLI::PositiveNumber);
    auto* sc_na_opt = scale->add_option("--na", sc_na, "Fixed Na");
    scale->add_option("--na-rule", sc_na_rule, "Na rule, e.g. 8.5M")->excludes(sc_na_opt);
    scale->add_option("--mode", sc_mode, "hn4|grid")->capture_default_str();
    scale->add_option("--seed", sc_seed)->capture_default_str();
    scale->add_option("--exclude", sc_exclude, "line|intersection|none")->capture_default_str();
    scale->add_option("--targets", sc_targets,
                      "Fixed targets on the reference lattice, scaled to each side");
    scale->add_option("--reference-side", sc_reference)->capture_default_str();
    scale->add_option("--steps", sc_steps, "auto|INT")->capture_default_str();
    add_common(scale, sc_common);

    // density
    Common de_common;
    std::string de_sides = "64,128";
    double de_fraction = 0.1;
    int de_trials = 10;
    std::string de_na_rule = "8.5M";
    std::string de_mode = "hn4";
    std::uint64_t de_seed = 1;
    std::string de_exclude = "line";
    double de_time = 1.75;
    std::string de_steps = "auto";
    auto* density = app.add_subcommand("density", "Runs with a fixed fraction of marked vertices");
    density->add_option("--sides", de_sides)->capture_default_str();
    density->add_option("--fraction", de_fraction)->required();
    density->add_option("--trials", de_trials)->capture_default_str()->check(CLI::PositiveNumber);
    density->add_option("--na-rule", de_na_rule)->capture_default_str();
    density->add_option("--mode", de_mode, "hn4|grid")->capture_default_str();
    density->add_option("--seed", de_seed)->capture_default_str();
    density->add_option("--exclude", de_exclude, "line|intersection|none")->capture_default_str();
    density->add_option("--time-coefficient", de_time, "Fixed time c*sqrt(N/M)")->capture_default_str();
    density->add_option("--steps", de_steps, "auto|INT")->capture_default_str();
    add_common(density, de_common);

    // fit
    Common fit_common;
    std::string fit_in;
    std::string fit_model = "sqrt";
    std::string fit_log_base = "e";
    std::string fit_mode;
    std::int64_t fit_m = 0;
    bool fit_compare = false;
    auto* fit = app.add_subcommand("fit", "Fit a runtime model to a records CSV");
    fit->add_option("--in", fit_in, "Records CSV")->required();
    fit->add_option("--model", fit_model, "sqrt|sqrtlog")->capture_default_str();
    fit->add_option("--log-base", fit_log_base, "Log base for sqrtlog: e|2|10|NUMBER")->capture_default_str();
    fit->add_option("--mode", fit_mode, "Only use records of this mode");
    fit->add_option("--m", fit_m, "Only use records with this M");
    fit->add_flag("--compare", fit_compare, "Report both models");
    add_common(fit, fit_common);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        for (auto* sub : app.get_subcommands()) {
            err << sub->help();
            break;
        }
        return kExitUsage;
    }

    const WarningHandler previous = set_warning_handler(
        [&err](std::string_view msg) { err << "warning: " << msg << '\n'; });
    struct Restore {
        WarningHandler handler;
        ~Restore() { set_warning_handler(std::move(handler)); }
    } restore{previous};

    try {
        if (simulate->parsed()) {
            Session session("simulate", sim_common, err);
            WalkConfig config{TopologyParams::from_side(sim_side), sim_na, parse_targets(sim_targets),
                              parse_edge_mode(sim_mode)};
            config = normalized(config);
            const auto steps = parse_steps(sim_steps);
            const std::int64_t m = static_cast<std::int64_t>(config.targets.size());
            const std::int64_t t_max =
                steps.value_or(default_step_budget(config.topology.vertex_count(), m, config.mode));
            auto& p = session.params();
            p["side"] = sim_side;
            p["targets"] = targets_json(config.targets);
            p["na"] = sim_na;
            p["mode"] = to_string(config.mode);
            p["steps"] = t_max;
            p["steps_rule"] = steps ? "explicit" : "auto";
            session.set_seed(sim_seed);
            Output output(sim_common.out, out);
            const WarningHandler quiet = set_warning_handler({});
            const auto trace = run(config, t_max, sim_common.workers);
            set_warning_handler(quiet);
            write_trace_csv(output.stream(), trace);
            session.finish(file_outputs(output));
            return kExitOk;
        }

        if (sweep->parsed()) {
            Session session("sweep", sw_common, err);
            const auto topology = TopologyParams::from_side(sw_side);
            const auto exclude = parse_exclude(sw_exclude);
            std::vector<GridVertex> targets;
            if (!sw_targets.empty()) {
                targets = parse_targets(sw_targets);
            } else if (sw_m > 0) {
                targets = random_target_set(sw_m, topology, sw_seed, exclude);
            } else {
                throw DomainError("sweep needs --targets or --m");
            }
            SweepOptions options;
            options.na_min = sw_min;
            options.na_max = sw_max;
            options.na_step = sw_step;
            options.t_max = parse_steps(sw_steps);
            options.workers = sw_common.workers;
            const auto mode = parse_edge_mode(sw_mode);
            auto& p = session.params();
            p["side"] = sw_side;
            p["targets"] = targets_json(targets);
            p["targets_source"] = sw_targets.empty() ? "random" : "explicit";
            p["exclude"] = sw_exclude;
            p["na_min"] = sw_min;
            p["na_max"] = sw_max;
            p["na_step"] = sw_step;
            p["mode"] = to_string(mode);
            p["steps"] = sw_steps;
            session.set_seed(sw_seed);
            const auto rows = sweep_self_loop(topology, targets, mode, options);
            Output output(sw_common.out, out);
            write_sweep_csv(output.stream(), rows);
            for (const auto& r : rows) {
                if (r.optimal && !sw_common.quiet) {
                    err << "[sweep] optimal Na = " << format_double(r.na)
                        << " (P = " << format_double(r.peak_probability) << ", t = " << r.peak_step
                        << ")\n";
                }
            }
            session.finish(file_outputs(output));
            return kExitOk;
        }

        if (scale->parsed()) {
            Session session("scale", sc_common, err);
            ScalingPlan plan;
            plan.sides = parse_int_list(sc_sides, "side");
            plan.m_values = sc_m_list.empty() ? std::vector<std::int64_t>{sc_m}
                                              : parse_int_list(sc_m_list, "M");
            plan.trials = sc_trials;
            plan.na_rule = !sc_na_rule.empty() ? NaRule::parse(sc_na_rule)
                           : !sc_na.empty()    ? NaRule::parse(sc_na)
                                               : NaRule::fixed(8.5);
            plan.mode = parse_edge_mode(sc_mode);
            plan.seed = sc_seed;
            plan.exclude = parse_exclude(sc_exclude);
            if (!sc_targets.empty()) {
                plan.fixed_targets = parse_targets(sc_targets);
                plan.fixed_reference_side = sc_reference;
            }
            plan.t_max = parse_steps(sc_steps);
            plan.workers = sc_common.workers;
            plan.progress = session.progress();
            auto& p = session.params();
            p["sides"] = plan.sides;
            p["m_values"] = plan.m_values;
            p["trials"] = plan.trials;
            p["na_rule"] = plan.na_rule.to_string();
            p["mode"] = to_string(plan.mode);
            p["exclude"] = sc_exclude;
            p["fixed_targets"] = plan.fixed_targets ? targets_json(*plan.fixed_targets) : nullptr;
            p["reference_side"] = sc_reference;
            p["steps"] = sc_steps;
            session.set_seed(plan.seed);
            const auto records = scaling_experiment(plan);
            Output output(sc_common.out, out);
            write_records_csv(output.stream(), records);
            session.finish(file_outputs(output));
            return kExitOk;
        }

        if (density->parsed()) {
            Session session("density", de_common, err);
            DensityPlan plan;
            plan.sides = parse_int_list(de_sides, "side");
            plan.fraction = de_fraction;
            plan.trials = de_trials;
            plan.na_rule = NaRule::parse(de_na_rule);
            plan.mode = parse_edge_mode(de_mode);
            plan.seed = de_seed;
            plan.exclude = parse_exclude(de_exclude);
            plan.time_coefficient = de_time;
            plan.t_max = parse_steps(de_steps);
            plan.workers = de_common.workers;
            plan.progress = session.progress();
            auto& p = session.params();
            p["sides"] = plan.sides;
            p["fraction"] = plan.fraction;
            p["trials"] = plan.trials;
            p["na_rule"] = plan.na_rule.to_string();
            p["mode"] = to_string(plan.mode);
            p["exclude"] = de_exclude;
            p["time_coefficient"] = plan.time_coefficient;
            p["steps"] = de_steps;
            session.set_seed(plan.seed);
            const auto results = density_experiment(plan);
            std::vector<ScalingRecord> records;
            for (const auto& r : results) records.push_back(r.record);
            const auto summary = summarize_density(results);
            Output output(de_common.out, out);
            write_records_csv(output.stream(), records);
            std::vector<std::string> outputs = file_outputs(output);
            if (output.is_file()) {
                const std::string summary_path = output.path() + ".summary.csv";
                std::ofstream s(summary_path, std::ios::binary);
                write_density_summary_csv(s, summary);
                outputs.push_back(summary_path);
            } else {
                write_density_summary_csv(err, summary);
            }
            session.finish(outputs);
            return kExitOk;
        }

        if (fit->parsed()) {
            Session session("fit", fit_common, err);
            std::ifstream in(fit_in);
            if (!in) throw DomainError("cannot read records file " + fit_in);
            auto records = read_records_csv(in);
            std::erase_if(records, [&](const ScalingRecord& r) {
                return (!fit_mode.empty() && r.mode != parse_edge_mode(fit_mode)) ||
                       (fit_m > 0 && r.m != fit_m);
            });
            double base = std::exp(1.0);
            if (fit_log_base != "e") {
                base = std::stod(fit_log_base);
            }
            const auto points = fit_points(records);
            nlohmann::json result;
            if (fit_compare) {
                const auto cmp = compare_models(points, base);
                result["sqrt"] = cmp.sqrt ? fit_to_json(*cmp.sqrt) : nlohmann::json{{"error", cmp.sqrt_error}};
                result["sqrtlog"] = cmp.sqrt_log ? fit_to_json(*cmp.sqrt_log)
                                                 : nlohmann::json{{"error", cmp.sqrt_log_error}};
            } else {
                result = fit_to_json(fit_scaling(points, {parse_model(fit_model), base}));
            }
            auto& p = session.params();
            p["in"] = fit_in;
            p["model"] = fit_compare ? "both" : fit_model;
            p["log_base"] = fit_log_base;
            p["mode_filter"] = fit_mode;
            p["m_filter"] = fit_m;
            Output output(fit_common.out, out);
            output.stream() << result.dump(2) << '\n';
            session.finish(file_outputs(output));
            return kExitOk;
        }
    } catch (const NoPeakError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNoPeak;
    } catch (const ResourceError& e) {
        err << "error: " << e.what() << '\n';
        return kExitResource;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

}  // namespace lqw
