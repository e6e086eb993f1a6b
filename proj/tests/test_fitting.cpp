#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "lqw/errors.hpp"
#include "lqw/fitting.hpp"

using namespace lqw;

namespace {

std::vector<FitPoint> synthetic(double c, ModelKind kind, std::int64_t m = 1) {
    const RuntimeModel model{kind};
    std::vector<FitPoint> pts;
    for (std::int64_t side : {64, 128, 256, 512}) {
        const std::int64_t n = side * side;
        pts.push_back({n, m, c * model(n, m)});
    }
    return pts;
}

}  // namespace

TEST(Model, Values) {
    const RuntimeModel sq{ModelKind::Sqrt};
    EXPECT_DOUBLE_EQ(sq(4096, 4), 32.0);
    const RuntimeModel sl{ModelKind::SqrtLog};
    EXPECT_DOUBLE_EQ(sl(4096, 1), std::sqrt(4096 * std::log(4096.0)));
    const RuntimeModel sl10{ModelKind::SqrtLog, 10.0};
    EXPECT_NEAR(sl10(4096, 1), std::sqrt(4096 * std::log10(4096.0)), 1e-12);
    EXPECT_THROW(sq(4, 4), DomainError);
    EXPECT_THROW(sq(4, 0), DomainError);
}

TEST(Fit, ExactSynthetic) {
    const auto r = fit_scaling(synthetic(2.0, ModelKind::Sqrt), {ModelKind::Sqrt});
    EXPECT_NEAR(r.coefficient, 2.0, 1e-14);
    EXPECT_NEAR(r.rms_relative_residual, 0.0, 1e-14);
    EXPECT_EQ(r.points, 4u);
}

TEST(Fit, CompareSeparatesModels) {
    const auto cmp = compare_models(synthetic(3.0, ModelKind::Sqrt));
    ASSERT_TRUE(cmp.sqrt && cmp.sqrt_log);
    EXPECT_LT(cmp.sqrt->rms_relative_residual, 1e-14);
    EXPECT_GT(cmp.sqrt_log->rms_relative_residual, 0.01);
}

TEST(Fit, ScaleEquivarianceAndPermutation) {
    auto pts = synthetic(1.7, ModelKind::Sqrt);
    pts[1].steps *= 1.1;
    pts[3].steps *= 0.93;
    const double c = fit_scaling(pts, {}).coefficient;
    auto scaled = pts;
    for (auto& p : scaled) p.steps *= 4.0;
    EXPECT_DOUBLE_EQ(fit_scaling(scaled, {}).coefficient, 4.0 * c);
    std::reverse(pts.begin(), pts.end());
    EXPECT_NEAR(fit_scaling(pts, {}).coefficient, c, 1e-15);
}

TEST(Fit, MinimizesSquaredError) {
    auto pts = synthetic(1.8, ModelKind::Sqrt);
    pts[0].steps += 7;
    pts[2].steps -= 30;
    const RuntimeModel model{};
    auto sse = [&](double c) {
        double s = 0.0;
        for (const auto& p : pts) {
            const double d = p.steps - c * model(p.n_elements, p.m);
            s += d * d;
        }
        return s;
    };
    double lo = 0.0, hi = 10.0;
    const double g = (std::sqrt(5.0) - 1) / 2;
    for (int i = 0; i < 200; ++i) {
        const double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
        if (sse(a) < sse(b)) hi = b;
        else lo = a;
    }
    const double c = fit_scaling(pts, model).coefficient;
    EXPECT_NEAR((lo + hi) / 2, c, 1e-9 * c);
}

TEST(Fit, PoolingRules) {
    std::vector<FitPoint> mixed{{4096, 1, 113}, {4096, 4, 56}, {4096, 16, 28}, {4096, 64, 14}};
    EXPECT_NO_THROW(fit_scaling(mixed, {ModelKind::Sqrt}));
    EXPECT_THROW(fit_scaling(mixed, {ModelKind::SqrtLog}), DomainError);
    const auto cmp = compare_models(mixed);
    EXPECT_TRUE(cmp.sqrt.has_value());
    EXPECT_FALSE(cmp.sqrt_log.has_value());
    EXPECT_FALSE(cmp.sqrt_log_error.empty());
}

TEST(Fit, DegenerateInput) {
    std::vector<FitPoint> two{{4096, 1, 113}, {16384, 1, 227}};
    EXPECT_THROW(fit_scaling(two, {}), DomainError);
    std::vector<FitPoint> same{{4096, 1, 113}, {4096, 1, 114}, {4096, 1, 112}};
    EXPECT_THROW(fit_scaling(same, {}), DomainError);
    EXPECT_EQ(parse_model("sqrtlog"), ModelKind::SqrtLog);
    EXPECT_THROW(parse_model("log"), DomainError);
}
