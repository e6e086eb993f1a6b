#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "lqw/cli.hpp"
#include "lqw/errors.hpp"
#include "lqw/experiments.hpp"
#include "lqw/fitting.hpp"
#include "lqw/hn4.hpp"
#include "lqw/peak.hpp"
#include "lqw/report.hpp"
#include "lqw/rng.hpp"
#include "lqw/walk.hpp"

namespace py = pybind11;
using namespace lqw;

namespace {

using Coords = std::vector<std::pair<std::int64_t, std::int64_t>>;

std::vector<GridVertex> to_vertices(const Coords& coords) {
    std::vector<GridVertex> out;
    out.reserve(coords.size());
    for (auto [x, y] : coords) out.push_back({x, y});
    return out;
}

Coords to_coords(const std::vector<GridVertex>& vs) {
    Coords out;
    out.reserve(vs.size());
    for (const auto& v : vs) out.emplace_back(v.x, v.y);
    return out;
}

WalkConfig make_config(std::int64_t side, const Coords& targets, double na, const std::string& mode) {
    WalkConfig c;
    c.topology = TopologyParams::from_side(side);
    c.targets = to_vertices(targets);
    c.na = na;
    c.mode = parse_edge_mode(mode);
    return c;
}

std::optional<ExceptionalRule> exclusion(const std::string& text) {
    if (text == "none") return std::nullopt;
    return parse_exceptional_rule(text);
}

py::dict record_dict(const ScalingRecord& r) {
    py::dict d;
    d["side"] = r.side;
    d["n_elements"] = r.n_elements;
    d["m"] = r.m;
    d["na"] = r.na;
    d["mode"] = std::string(to_string(r.mode));
    d["seed"] = r.seed;
    d["trial"] = r.trial;
    d["peak_step"] = r.peak_step;
    d["peak_probability"] = r.peak_probability;
    d["amplified_cost"] = r.amplified_cost;
    return d;
}

py::dict fit_dict(const FitResult& f) {
    py::dict d;
    d["model"] = std::string(to_string(f.model.kind));
    d["coefficient"] = f.coefficient;
    d["rms_relative_residual"] = f.rms_relative_residual;
    d["points"] = f.points;
    d["log_base"] = f.model.log_base_name();
    return d;
}

}  // namespace

PYBIND11_MODULE(_lqw, m) {
    m.doc() = "Lackadaisical quantum-walk search on a periodic grid with HN4 long-range edges";

    py::register_exception<NoPeakError>(m, "NoPeakError", PyExc_RuntimeError);
    py::register_exception<ResourceError>(m, "ResourceError", PyExc_MemoryError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const DomainError& e) {
            py::set_error(PyExc_ValueError, e.what());
        }
    });

    m.attr("ENGINE_VERSION") = kEngineVersion;
    m.attr("PRNG") = std::string(kPrngId);

    // topology
    m.def("decompose", [](std::int64_t x, int n) {
        const auto h = decompose(x, n);
        return py::make_tuple(h.level, h.rank);
    }, py::arg("x"), py::arg("n"), "1-based x -> (level, rank) with x = 2^level (2 rank + 1).");
    m.def("compose", [](int level, std::int64_t rank, int n) { return compose({level, rank}, n); },
          py::arg("level"), py::arg("rank"), py::arg("n"));
    m.def("long_range_neighbor", &long_range_neighbor, py::arg("x"), py::arg("step"), py::arg("n"));
    m.def("grid_neighbor", &grid_neighbor, py::arg("c"), py::arg("step"), py::arg("side"));
    m.def("is_exceptional", [](std::int64_t x, std::int64_t y, int n, const std::string& rule) {
        return is_exceptional({x, y}, n, parse_exceptional_rule(rule));
    }, py::arg("x"), py::arg("y"), py::arg("n"), py::arg("rule") = "line");

    // engine
    py::class_<Walk>(m, "Walk")
        .def(py::init([](std::int64_t side, const Coords& targets, double na, const std::string& mode,
                         int workers) { return Walk(make_config(side, targets, na, mode), workers); }),
             py::arg("side"), py::arg("targets"), py::arg("na"), py::arg("mode") = "hn4",
             py::arg("workers") = 1)
        .def("step", [](Walk& w, std::int64_t count) {
            py::gil_scoped_release release;
            for (std::int64_t i = 0; i < count; ++i) w.step();
        }, py::arg("count") = 1)
        .def("reset", &Walk::reset)
        .def("success_probability", &Walk::success_probability)
        .def_property_readonly("steps_taken", &Walk::steps_taken)
        .def_property_readonly("norm_squared", [](const Walk& w) { return w.state().norm_squared(); })
        .def("state", [](const Walk& w) {
            const auto& s = w.state();
            py::array_t<std::complex<double>> out({static_cast<py::ssize_t>(s.coin_dim()),
                                                   static_cast<py::ssize_t>(s.vertices())});
            std::copy(s.amplitudes().begin(), s.amplitudes().end(), out.mutable_data());
            return out;
        }, "Copy of the amplitudes, shape (coin, vertex) with vertex = x + side * y.");

    m.def("run", [](std::int64_t side, const Coords& targets, double na, std::int64_t steps,
                    const std::string& mode, int workers) {
        const auto cfg = make_config(side, targets, na, mode);
        ProbabilityTrace trace;
        {
            py::gil_scoped_release release;
            trace = lqw::run(cfg, steps, workers);
        }
        py::array_t<double> out(static_cast<py::ssize_t>(trace.size()));
        std::copy(trace.begin(), trace.end(), out.mutable_data());
        return out;
    }, py::arg("side"), py::arg("targets"), py::arg("na"), py::arg("steps"), py::arg("mode") = "hn4",
       py::arg("workers") = 1, "Success probability P(t) for t = 0..steps.");

    m.def("detect_first_peak", [](const std::vector<double>& trace, int window) {
        PeakRule rule;
        rule.window = window;
        const auto r = detect_first_peak(trace, rule);
        return py::make_tuple(r.step, r.probability);
    }, py::arg("trace"), py::arg("window") = 5);

    m.def("first_peak", [](std::int64_t side, const Coords& targets, double na, const std::string& mode,
                           std::optional<std::int64_t> steps, int workers) {
        const auto cfg = make_config(side, targets, na, mode);
        const auto n = cfg.topology.vertex_count();
        const auto mcount = static_cast<std::int64_t>(normalized(cfg).targets.size());
        const auto budget = steps.value_or(default_step_budget(n, mcount, cfg.mode));
        PeakResult r;
        {
            py::gil_scoped_release release;
            r = run_to_first_peak(cfg, budget, PeakRule::for_ratio(n, mcount), workers);
        }
        return py::make_tuple(r.step, r.probability);
    }, py::arg("side"), py::arg("targets"), py::arg("na"), py::arg("mode") = "hn4",
       py::arg("steps") = py::none(), py::arg("workers") = 1);

    // experiments
    m.def("random_targets", [](std::int64_t m_count, std::int64_t side, std::uint64_t seed,
                               const std::string& exclude) {
        return to_coords(random_target_set(m_count, TopologyParams::from_side(side), seed, exclusion(exclude)));
    }, py::arg("m"), py::arg("side"), py::arg("seed"), py::arg("exclude") = "line");

    m.def("sweep", [](std::int64_t side, const Coords& targets, double na_min, double na_max,
                      double na_step, const std::string& mode, int workers) {
        SweepOptions opt;
        opt.na_min = na_min;
        opt.na_max = na_max;
        opt.na_step = na_step;
        opt.workers = workers;
        std::vector<SweepRow> rows;
        {
            py::gil_scoped_release release;
            rows = sweep_self_loop(TopologyParams::from_side(side), to_vertices(targets),
                                   parse_edge_mode(mode), opt);
        }
        py::list out;
        for (const auto& r : rows) {
            py::dict d;
            d["na"] = r.na;
            d["peak_step"] = r.peak_step;
            d["peak_probability"] = r.peak_probability;
            d["optimal"] = r.optimal;
            out.append(d);
        }
        return out;
    }, py::arg("side"), py::arg("targets"), py::arg("na_min") = 1.0, py::arg("na_max") = 30.0,
       py::arg("na_step") = 0.5, py::arg("mode") = "hn4", py::arg("workers") = 1);

    m.def("scaling", [](const std::vector<std::int64_t>& sides, const std::vector<std::int64_t>& m_values,
                        const std::string& na, int trials, std::uint64_t seed, const std::string& mode,
                        const std::string& exclude, std::optional<Coords> targets,
                        std::int64_t reference_side, int workers) {
        ScalingPlan plan;
        plan.sides = sides;
        plan.m_values = m_values;
        plan.na_rule = NaRule::parse(na);
        plan.trials = trials;
        plan.seed = seed;
        plan.mode = parse_edge_mode(mode);
        plan.exclude = exclusion(exclude);
        if (targets) plan.fixed_targets = to_vertices(*targets);
        plan.fixed_reference_side = reference_side;
        plan.workers = workers;
        std::vector<ScalingRecord> records;
        {
            py::gil_scoped_release release;
            records = scaling_experiment(plan);
        }
        py::list out;
        for (const auto& r : records) out.append(record_dict(r));
        return out;
    }, py::arg("sides"), py::arg("m_values") = std::vector<std::int64_t>{1}, py::arg("na") = "8.5",
       py::arg("trials") = 10, py::arg("seed") = 1, py::arg("mode") = "hn4", py::arg("exclude") = "line",
       py::arg("targets") = py::none(), py::arg("reference_side") = 16, py::arg("workers") = 1,
       "First-peak records per (side, m, trial). `na` is a fixed value or a per-target rule like \"8.5M\".");

    // fitting
    m.def("fit", [](const std::vector<std::tuple<std::int64_t, std::int64_t, double>>& points,
                    const std::string& model, double log_base) {
        std::vector<FitPoint> pts;
        for (auto [n, mm, t] : points) pts.push_back({n, mm, t});
        return fit_dict(fit_scaling(pts, {parse_model(model), log_base}));
    }, py::arg("points"), py::arg("model") = "sqrt", py::arg("log_base") = 2.718281828459045,
       "Least-squares fit t = c f(N, M) through the origin; points are (N, M, steps).");

    m.def("cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"), "Run an lqw command line in-process; returns (exit_code, stdout, stderr).");
}
