#include <gtest/gtest.h>

#include <stdexcept>
#include <vector>

#include "conformal/metrics.hpp"
#include "conformal/rng.hpp"
#include "fixtures.hpp"

namespace conformal {
namespace {

using testing::kInf;

TEST(RegressionReport, UnboundedIntervals) {
    const std::vector<double> y{1, 2, 3};
    const std::vector<PredictionInterval> iv(3, PredictionInterval(0, -kInf, kInf));
    const auto r = regression_report(y, iv);
    EXPECT_EQ(r.coverage, 1.0);
    EXPECT_EQ(r.mean_width, kInf);
    EXPECT_EQ(r.n_infinite, 3u);
}

TEST(RegressionReport, BoundsAreClosed) {
    const std::vector<double> y{1, 2};
    const std::vector<PredictionInterval> iv{{0, 1, 2}, {0, 0, 2}};
    EXPECT_EQ(regression_report(y, iv).coverage, 1.0);
}

TEST(RegressionReport, HandCountedMixedCase) {
    std::vector<double> y;
    std::vector<PredictionInterval> iv;
    // 7 covered (widths 1..7), 3 missed (widths 2, 2, 2).
    for (int i = 1; i <= 7; ++i) {
        y.push_back(0.5);
        iv.emplace_back(0.0, 0.0, static_cast<double>(i));
    }
    for (int i = 0; i < 3; ++i) {
        y.push_back(10.0);
        iv.emplace_back(0.0, -1.0, 1.0);
    }
    const auto r = regression_report(y, iv);
    EXPECT_DOUBLE_EQ(r.coverage, 0.7);
    EXPECT_DOUBLE_EQ(r.mean_width, (28.0 + 6.0) / 10.0);
    EXPECT_EQ(r.n_infinite, 0u);
    EXPECT_EQ(r.n, 10u);
}

TEST(RegressionReport, Errors) {
    const std::vector<double> y{1, 2};
    const std::vector<PredictionInterval> iv{{0, 1, 2}};
    EXPECT_THROW(regression_report(y, iv), std::invalid_argument);
    EXPECT_THROW(regression_report(std::vector<double>{}, std::vector<PredictionInterval>{}),
                 std::invalid_argument);
}

TEST(RegressionReport, MatchesLoopAndIsPermutationInvariant) {
    Rng rng(71);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng.index(60);
        std::vector<double> y(n);
        std::vector<PredictionInterval> iv;
        std::size_t inside = 0;
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = rng.normal();
            const double a = rng.normal(), b = a + std::abs(rng.normal());
            iv.emplace_back(0.0, a, b);
            inside += a <= y[i] && y[i] <= b;
        }
        const auto r = regression_report(y, iv);
        ASSERT_EQ(r.coverage, static_cast<double>(inside) / static_cast<double>(n));
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        shuffle(order, rng);
        std::vector<double> y2;
        std::vector<PredictionInterval> iv2;
        for (std::size_t i : order) {
            y2.push_back(y[i]);
            iv2.push_back(iv[i]);
        }
        const auto r2 = regression_report(y2, iv2);
        ASSERT_EQ(r2.coverage, r.coverage);
        ASSERT_NEAR(r2.mean_width, r.mean_width, 1e-12);
    }
}

PredictionSet set_of(std::vector<bool> inc) { return PredictionSet(std::move(inc), 0); }

TEST(ClassificationReport, FullAndEmptySets) {
    const std::vector<int> y{0, 1, 2};
    const std::vector<PredictionSet> full(3, set_of({true, true, true}));
    const auto f = classification_report(y, full);
    EXPECT_EQ(f.coverage, 1.0);
    EXPECT_EQ(f.mean_set_size, 3.0);
    EXPECT_EQ(f.empty_fraction, 0.0);
    const std::vector<PredictionSet> none(3, set_of({false, false, false}));
    const auto e = classification_report(y, none);
    EXPECT_EQ(e.coverage, 0.0);
    EXPECT_EQ(e.empty_fraction, 1.0);
    EXPECT_EQ(e.mean_set_size, 0.0);
}

TEST(ClassificationReport, HandCountedFivePoints) {
    const std::vector<int> y{0, 1, 2, 0, 1};
    const std::vector<PredictionSet> sets{
        set_of({true, false, false}),  // covered, size 1
        set_of({true, false, true}),   // missed, size 2
        set_of({false, false, false}), // missed, empty
        set_of({true, true, true}),    // covered, size 3
        set_of({false, true, false}),  // covered, size 1
    };
    const auto r = classification_report(y, sets);
    EXPECT_DOUBLE_EQ(r.coverage, 0.6);
    EXPECT_DOUBLE_EQ(r.mean_set_size, 7.0 / 5.0);
    EXPECT_DOUBLE_EQ(r.empty_fraction, 0.2);
    EXPECT_THROW(classification_report(std::vector<int>{0}, sets), std::invalid_argument);
}

TEST(RollingCoverage, WindowEdgeCases) {
    const std::vector<double> y{0, 5, 0, 5};
    const std::vector<PredictionInterval> iv(4, PredictionInterval(0, -1, 1));
    EXPECT_EQ(rolling_coverage(y, iv, 4), (std::vector<double>{0.5}));
    EXPECT_EQ(rolling_coverage(y, iv, 1), (std::vector<double>{1, 0, 1, 0}));
    EXPECT_THROW(rolling_coverage(y, iv, 0), std::invalid_argument);
    EXPECT_THROW(rolling_coverage(y, iv, 5), std::invalid_argument);
}

TEST(RollingCoverage, ShiftCaseByHand) {
    // Covered for the first 6 points, then the series jumps out.
    std::vector<double> y(10, 0.0);
    for (std::size_t i = 6; i < 10; ++i) y[i] = 10.0;
    const std::vector<PredictionInterval> iv(10, PredictionInterval(0, -1, 1));
    EXPECT_EQ(rolling_coverage(y, iv, 4),
              (std::vector<double>{1.0, 1.0, 1.0, 0.75, 0.5, 0.25, 0.0}));
}

}  // namespace
}  // namespace conformal
