#pragma once

// Single-coefficient runtime models t ~ c * f(N, M), fitted by least squares
// through the origin.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace lqw {

enum class ModelKind {
    Sqrt,     ///< f = sqrt(N/M)
    SqrtLog,  ///< f = sqrt((N/M) log(N/M))
};

std::string_view to_string(ModelKind kind);
ModelKind parse_model(std::string_view text);

struct RuntimeModel {
    ModelKind kind = ModelKind::Sqrt;
    /// Base of the logarithm in SqrtLog. Natural log by default; the base only
    /// rescales the coefficient.
    double log_base = 2.718281828459045;

    /// Throws DomainError unless N > M >= 1.
    double operator()(std::int64_t n, std::int64_t m) const;
    std::string log_base_name() const;
};

/// One observed runtime.
struct FitPoint {
    std::int64_t n_elements = 0;
    std::int64_t m = 0;
    double steps = 0.0;
};

struct FitResult {
    RuntimeModel model;
    double coefficient = 0.0;
    double rms_relative_residual = 0.0;
    std::size_t points = 0;
};

/// c = sum t f / sum f^2; residual = rms of (t - c f) / (c f). Requires >= 3
/// points spanning >= 3 distinct values of N/M. SqrtLog refuses points with
/// mixed M.
FitResult fit_scaling(std::span<const FitPoint> points, const RuntimeModel& model);

struct ModelComparison {
    std::optional<FitResult> sqrt;
    std::optional<FitResult> sqrt_log;
    /// Why a model could not be fitted (empty when both succeeded).
    std::string sqrt_error;
    std::string sqrt_log_error;
};

/// Fits both models to the same points; a model that cannot be fitted is left
/// empty with its error message.
ModelComparison compare_models(std::span<const FitPoint> points, double log_base = 2.718281828459045);

}  // namespace lqw
