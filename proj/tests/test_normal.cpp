#include "ddexec/normal.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace ddexec;

TEST(Normal, CdfMatchesBoost) {
    for (double x = -9.0; x <= 9.0; x += 0.037) {
        const double ref = oracle::cdf(x);
        EXPECT_NEAR(normal_cdf(x), ref, 1e-15 + 1e-13 * ref) << x;
    }
}

TEST(Normal, QuantileMatchesBoostToBetterThan1e9) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 20000; ++i) {
        const double p = i % 4 == 0 ? std::pow(10.0, -15.0 * u(rng)) : u(rng);
        if (p <= 0.0 || p >= 1.0) continue;
        const double ref = oracle::quantile(p);
        EXPECT_NEAR(normal_quantile(p), ref, 1e-9 * std::max(1.0, std::abs(ref))) << p;
        EXPECT_NEAR(normal_quantile(p), ref, 1e-12 * std::max(1.0, std::abs(ref))) << p;
    }
}

TEST(Normal, QuantileKnownValues) {
    EXPECT_EQ(normal_quantile(0.5), 0.0);
    EXPECT_NEAR(normal_quantile(0.05), -1.644853626951472714863848907991632136083, 1e-14);
    EXPECT_NEAR(normal_quantile(0.975), 1.959963984540054, 1e-14);
    EXPECT_TRUE(std::isinf(normal_quantile(0.0)));
    EXPECT_THROW(normal_quantile(1.5), std::domain_error);
}

TEST(Normal, StreamIsReproducible) {
    const auto a = standard_normals(42, 1000);
    const auto b = standard_normals(42, 1000);
    const auto c = standard_normals(43, 1000);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
}

TEST(Normal, StreamMomentsLookStandard) {
    const auto z = standard_normals(2024, 200000);
    double m = 0, v = 0;
    for (double x : z) m += x;
    m /= z.size();
    for (double x : z) v += (x - m) * (x - m);
    v /= z.size() - 1;
    EXPECT_NEAR(m, 0.0, 4.0 / std::sqrt(200000.0));
    EXPECT_NEAR(v, 1.0, 0.01);
}
