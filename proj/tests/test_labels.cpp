#include <gtest/gtest.h>

#include <random>
#include <stdexcept>
#include <vector>

#include "swat/buckets.hpp"
#include "swat/labels.hpp"
#include "swat/verify.hpp"

using swat::BucketScheme;

namespace {

BucketScheme fig_scheme() {
  const std::vector<std::int64_t> raw{5, 12, 22};
  return BucketScheme::from_endpoints(raw, false);
}

}  // namespace

TEST(Labels, InteriorWatchTime) {
  const auto l = swat::encode(fig_scheme(), 10);
  ASSERT_EQ(l.values.size(), 3u);
  EXPECT_DOUBLE_EQ(l.values[0], 1.0);
  EXPECT_DOUBLE_EQ(l.values[1], 5.0 / 7.0);
  EXPECT_DOUBLE_EQ(l.values[2], 0.0);
  EXPECT_FALSE(l.clipped);
}

TEST(Labels, ZeroAndClip) {
  EXPECT_EQ(swat::encode(fig_scheme(), 0).values, (std::vector<double>{0, 0, 0}));
  const auto l = swat::encode(fig_scheme(), 30);
  EXPECT_EQ(l.values, (std::vector<double>{1, 1, 1}));
  EXPECT_TRUE(l.clipped);
  EXPECT_FALSE(swat::encode(fig_scheme(), 22).clipped);
}

TEST(Labels, NegativeRejected) {
  EXPECT_THROW(swat::encode(fig_scheme(), -1), std::invalid_argument);
}

TEST(Labels, Decode) {
  EXPECT_EQ(swat::decode(fig_scheme(), {{1.0, 5.0 / 7.0, 0.0}, false}), 10);
  EXPECT_EQ(swat::decode(fig_scheme(), {{0, 0, 0}, false}), 0);
  EXPECT_EQ(swat::decode(fig_scheme(), {{1, 1, 1}, false}), 22);
}

TEST(Labels, DecodeRejectsMalformed) {
  EXPECT_THROW(swat::decode(fig_scheme(), {{0, 1, 0}, false}), std::invalid_argument);
  EXPECT_THROW(swat::decode(fig_scheme(), {{0.5, 0.5, 0}, false}), std::invalid_argument);
  EXPECT_THROW(swat::decode(fig_scheme(), {{1, 1.5, 0}, false}), std::invalid_argument);
  EXPECT_THROW(swat::decode(fig_scheme(), {{1, 1}, false}), std::invalid_argument);
}

TEST(Labels, LabelsAreMonotoneWithOnePartial) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto s = swat::random_scheme(rng, 1, 8, 1, 40, false);
    for (std::int64_t t = 0; t <= s.last() + 3; ++t) {
      const auto l = swat::encode(s, t);
      int partial = 0;
      for (std::size_t k = 0; k < l.values.size(); ++k) {
        if (k > 0) {
          EXPECT_LE(l.values[k], l.values[k - 1]);
        }
        if (l.values[k] > 0.0 && l.values[k] < 1.0) ++partial;
      }
      EXPECT_LE(partial, 1);
    }
  }
}

TEST(Labels, RoundTripExhaustive) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto s = swat::random_scheme(rng, 1, 12, 1, 80, false);
    for (std::int64_t t = 0; t <= s.last(); ++t) {
      ASSERT_EQ(swat::decode(s, swat::encode(s, t)), t) << "t=" << t;
    }
  }
}

TEST(Labels, FromBucketTimes) {
  const std::vector<std::int64_t> times{5, 2, 0};
  const auto l = swat::labels_from_bucket_times(fig_scheme(), times);
  EXPECT_EQ(l, (std::vector<double>{1.0, 2.0 / 7.0, 0.0}));
  const std::vector<std::int64_t> too_long{6, 0, 0};
  EXPECT_THROW(swat::labels_from_bucket_times(fig_scheme(), too_long), std::invalid_argument);
  const std::vector<std::int64_t> short_list{1, 1};
  EXPECT_THROW(swat::labels_from_bucket_times(fig_scheme(), short_list), std::invalid_argument);
}
