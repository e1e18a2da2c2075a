#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "conformal/learners.hpp"
#include "conformal/synth.hpp"

namespace conformal {
namespace {

TEST(Synth, NoiselessLinearIsExactlyLinear) {
    const auto data = generate({LinearGaussian{100, 3, 0.0}, 81});
    const auto model = fit_ols(data);
    for (std::size_t i = 0; i < data.size(); ++i) {
        EXPECT_NEAR(model.predict(data.row(i)), data.target(i), 1e-9);
    }
}

TEST(Synth, SeedDeterminism) {
    const std::vector<GeneratorSpec> specs{
        {LinearGaussian{50, 2, 1.0}, 1}, {Heteroscedastic{50}, 2},
        {Blobs{60, 3, 2, 3.0}, 3}, {Ar1Changepoint{80, 0.5, 1.0, 10.0, 40}, 4}};
    for (const auto& s : specs) {
        EXPECT_EQ(generate(s), generate(s));
        GeneratorSpec other = s;
        other.seed += 1;
        EXPECT_FALSE(generate(s) == generate(other));
    }
}

TEST(Synth, BlobsAreBalancedAndLabelled) {
    const auto data = generate({Blobs{301, 4, 3, 2.0}, 82});
    ASSERT_EQ(data.n_classes(), 4);
    std::vector<int> counts(4, 0);
    for (std::size_t i = 0; i < data.size(); ++i) counts[data.label(i)]++;
    for (int c : counts) EXPECT_GE(c, 75);
    EXPECT_EQ(data.dims(), 3u);
}

TEST(Synth, HeteroscedasticSpreadGrowsWithX) {
    const auto data = generate({Heteroscedastic{4000}, 83});
    double low = 0.0, high = 0.0;
    int nl = 0, nh = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double x = data.row(i)[0];
        const double r = data.target(i) - (2 * x + 1);
        ASSERT_GE(x, 0.0);
        ASSERT_LT(x, 5.0);
        if (x < 1) {
            low += r * r;
            ++nl;
        } else if (x > 4) {
            high += r * r;
            ++nh;
        }
    }
    EXPECT_GT(high / nh, 4 * low / nl);
}

TEST(Synth, Ar1ShiftMovesTheMean) {
    const std::size_t n = 20000;
    const double sigma = 1.0, phi = 0.5;
    const auto data = generate({Ar1Changepoint{n, phi, sigma, 10.0, n / 2}, 84});
    double before = 0.0, after = 0.0;
    for (std::size_t t = 0; t < n / 2; ++t) before += data.target(t);
    for (std::size_t t = n / 2; t < n; ++t) after += data.target(t);
    before /= n / 2.0;
    after /= n / 2.0;
    // Long-run sd of an AR(1) mean is sigma / (1 - phi) per sqrt(point);
    // the difference of two half-sample means doubles it.
    const double sd = 2 * sigma / (1 - phi);
    EXPECT_NEAR(after - before, 10.0, 3 * sd / std::sqrt(static_cast<double>(n)));
    EXPECT_EQ(data.row(5)[0], 5.0);
}

TEST(Synth, InvalidSpecsThrow) {
    EXPECT_THROW(generate({LinearGaussian{0, 1, 1.0}, 0}), std::invalid_argument);
    EXPECT_THROW(generate({Ar1Changepoint{10, 0.5, 1.0, 1.0, 10}, 0}), std::invalid_argument);
    EXPECT_THROW(generate({Blobs{10, 0, 2, 1.0}, 0}), std::invalid_argument);
}

TEST(LagFeatures, HandConstruction) {
    const auto d = build_lag_features(std::vector<double>{1, 2, 3, 4}, 2);
    ASSERT_EQ(d.size(), 2u);
    EXPECT_EQ(d.features(), Matrix::from_rows({{2, 1}, {3, 2}}));
    EXPECT_EQ(std::vector<double>(d.targets().begin(), d.targets().end()), (std::vector<double>{3, 4}));
    EXPECT_EQ(d.feature_names(), (std::vector<std::string>{"lag1", "lag2"}));
}

TEST(LagFeatures, RowCountAndConstantSeries) {
    EXPECT_EQ(build_lag_features(std::vector<double>{1, 2, 3, 4, 5}, 4).size(), 1u);
    const auto c = build_lag_features(std::vector<double>(10, 7.0), 3);
    EXPECT_EQ(c.size(), 7u);
    for (double v : c.features().values()) EXPECT_EQ(v, 7.0);
    for (double v : c.targets()) EXPECT_EQ(v, 7.0);
    EXPECT_THROW(build_lag_features(std::vector<double>{1, 2}, 2), std::invalid_argument);
    EXPECT_THROW(build_lag_features(std::vector<double>{1, 2}, 0), std::invalid_argument);
}

}  // namespace
}  // namespace conformal
