#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace swat {

// Bucketization of the watch-time horizon.
//
// Buckets are indexed from 0. Bucket k covers (lower(k), upper(k)] with
// lower(0) = 0, and t = 0 is assigned to bucket 0. When the scheme is
// tail_open, index size() denotes the unbounded bucket (x_N, inf).
class BucketScheme {
 public:
  struct Location {
    std::size_t index = 0;
    // t exceeded the last endpoint of a closed scheme; index is the last
    // bounded bucket.
    bool clipped = false;
  };

  // Sorts, dedups and drops non-positive values.
  static BucketScheme from_endpoints(std::span<const std::int64_t> raw,
                                     bool tail_open);

  // Endpoints are the q-percentiles for q = step, 2 step, ..., 100 where the
  // q-percentile of n sorted values is the element at 1-based index
  // ceil(q n / 100).
  static BucketScheme from_percentiles(std::span<const std::int64_t> targets,
                                       double percent_step, bool tail_open);

  // The six endpoint layouts compared in the bucket-definition ablation:
  //   1: 5-percentile grid      2: 2-percentile grid    3: 1-percentile grid
  //   4: 2-pct grid to p96, then 5-pct grid of the top 4%
  //   5: 2-pct grid to p96, then 2-pct grid of the top 4%
  //   6: 1-pct grid to p90, then 1-pct grid of the top 10%
  static BucketScheme ablation_choice(std::span<const std::int64_t> targets,
                                      int choice, bool tail_open);

  std::size_t size() const { return endpoints_.size(); }
  bool tail_open() const { return tail_open_; }
  const std::vector<std::int64_t>& endpoints() const { return endpoints_; }

  std::int64_t lower(std::size_t k) const {
    return k == 0 ? 0 : endpoints_[k - 1];
  }
  std::int64_t upper(std::size_t k) const { return endpoints_[k]; }
  std::int64_t width(std::size_t k) const { return upper(k) - lower(k); }
  std::int64_t last() const { return endpoints_.back(); }

  // Index of the bucket containing t, honouring tail_open.
  Location bucket_of(std::int64_t t) const;

  // Index of the bucket containing t where t > x_N always maps to size().
  std::size_t open_index(std::int64_t t) const;

  BucketScheme with_tail(bool tail_open) const {
    BucketScheme s = *this;
    s.tail_open_ = tail_open;
    return s;
  }

  bool operator==(const BucketScheme&) const = default;

 private:
  BucketScheme(std::vector<std::int64_t> endpoints, bool tail_open)
      : endpoints_(std::move(endpoints)), tail_open_(tail_open) {}

  std::vector<std::int64_t> endpoints_;
  bool tail_open_ = false;
};

// Parses "5,12,22".
std::vector<std::int64_t> parse_endpoint_list(std::string_view text);

nlohmann::json to_json(const BucketScheme& scheme);
BucketScheme scheme_from_json(const nlohmann::json& j);

}  // namespace swat
