#include "lqw/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "lqw/errors.hpp"

namespace lqw {

std::string_view to_string(ModelKind kind) { return kind == ModelKind::Sqrt ? "sqrt" : "sqrtlog"; }

ModelKind parse_model(std::string_view text) {
    if (text == "sqrt") return ModelKind::Sqrt;
    if (text == "sqrtlog" || text == "sqrt_log") return ModelKind::SqrtLog;
    throw DomainError("unknown runtime model '" + std::string(text) + "' (expected sqrt|sqrtlog)");
}

double RuntimeModel::operator()(std::int64_t n, std::int64_t m) const {
    if (m < 1 || n <= m) throw DomainError("runtime model needs N > M >= 1");
    const double ratio = static_cast<double>(n) / static_cast<double>(m);
    if (kind == ModelKind::Sqrt) return std::sqrt(ratio);
    if (!(ratio > 1.0)) throw DomainError("sqrtlog model needs N/M > 1");
    if (!(log_base > 1.0)) throw DomainError("log base must exceed 1");
    return std::sqrt(ratio * std::log(ratio) / std::log(log_base));
}

std::string RuntimeModel::log_base_name() const {
    if (std::abs(log_base - 2.718281828459045) < 1e-12) return "e";
    std::ostringstream out;
    out << log_base;
    return out.str();
}

FitResult fit_scaling(std::span<const FitPoint> points, const RuntimeModel& model) {
    if (points.size() < 3) throw DomainError("fit needs at least 3 records");
    std::set<std::pair<std::int64_t, std::int64_t>> ratios;
    std::set<std::int64_t> ms;
    for (const auto& p : points) {
        // N/M as a reduced fraction, so 64^2/4 and 128^2/16 count once.
        const std::int64_t g = std::gcd(p.n_elements, p.m);
        ratios.emplace(p.n_elements / std::max<std::int64_t>(g, 1), p.m / std::max<std::int64_t>(g, 1));
        ms.insert(p.m);
    }
    if (ratios.size() < 3) throw DomainError("fit needs at least 3 distinct values of N/M");
    if (model.kind == ModelKind::SqrtLog && ms.size() > 1) {
        throw DomainError("sqrtlog fits cannot pool records with different M");
    }

    double tf = 0.0;
    double ff = 0.0;
    for (const auto& p : points) {
        const double f = model(p.n_elements, p.m);
        tf += p.steps * f;
        ff += f * f;
    }
    const double c = tf / ff;
    if (!(c > 0.0)) throw DomainError("fitted coefficient is not positive");

    double sq = 0.0;
    for (const auto& p : points) {
        const double pred = c * model(p.n_elements, p.m);
        const double rel = (p.steps - pred) / pred;
        sq += rel * rel;
    }
    return {model, c, std::sqrt(sq / static_cast<double>(points.size())), points.size()};
}

ModelComparison compare_models(std::span<const FitPoint> points, double log_base) {
    ModelComparison out;
    try {
        out.sqrt = fit_scaling(points, {ModelKind::Sqrt, log_base});
    } catch (const DomainError& e) {
        out.sqrt_error = e.what();
    }
    try {
        out.sqrt_log = fit_scaling(points, {ModelKind::SqrtLog, log_base});
    } catch (const DomainError& e) {
        out.sqrt_log_error = e.what();
    }
    return out;
}

}  // namespace lqw
