#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "swat/verify.hpp"

TEST(Verify, GradientErrorFloor) {
  EXPECT_DOUBLE_EQ(swat::gradient_error(1e-9, 2e-9), 1e-9);
  EXPECT_DOUBLE_EQ(swat::gradient_error(100, 101), 1.0 / 101);
}

TEST(Verify, NumericGradientOfQuadratic) {
  const std::vector<double> x{1.0, -2.0};
  const auto g = swat::numeric_gradient(
      [](std::span<const double> v) { return v[0] * v[0] + 3 * v[0] * v[1]; }, x);
  EXPECT_NEAR(g[0], 2 - 6, 1e-7);
  EXPECT_NEAR(g[1], 3, 1e-7);
}

TEST(Verify, RandomSchemeRanges) {
  std::mt19937_64 rng(0);
  for (int i = 0; i < 200; ++i) {
    const auto s = swat::random_scheme(rng, 2, 5, 3, 7, true);
    EXPECT_GE(s.size(), 2u);
    EXPECT_LE(s.size(), 5u);
    EXPECT_TRUE(s.tail_open());
    for (std::size_t k = 0; k < s.size(); ++k) {
      EXPECT_GE(s.width(k), 3);
      EXPECT_LE(s.width(k), 7);
    }
  }
}

TEST(Verify, DefaultSuitePasses) {
  const auto r = swat::run_verification({});
  EXPECT_TRUE(r.passed());
  EXPECT_TRUE(r.failed().empty());
  EXPECT_GE(r.properties.size(), 11u);
  for (const auto& p : r.properties) EXPECT_GT(p.checks, 0u) << p.name;
}

TEST(Verify, SeededReportIsDeterministic) {
  swat::VerifyOptions o;
  o.trials = 50;
  o.seed = 7;
  EXPECT_EQ(swat::to_json(swat::run_verification(o)).dump(),
            swat::to_json(swat::run_verification(o)).dump());
}

TEST(Verify, CorruptedGradientIsCaught) {
  for (auto head : {swat::HeadKind::Binom, swat::HeadKind::Geo, swat::HeadKind::VGeo,
                    swat::HeadKind::WLR}) {
    swat::VerifyOptions o;
    o.trials = 20;
    o.corrupt_gradient = head;
    const auto r = swat::run_verification(o);
    EXPECT_FALSE(r.passed());
    const auto failed = r.failed();
    const auto name = "gradient_fidelity/" + std::string(swat::head_name(head));
    EXPECT_NE(std::find(failed.begin(), failed.end(), name), failed.end()) << name;
  }
}
