#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "swat/buckets.hpp"

namespace swat {

// Fraction of each bounded bucket watched, built from a total watch time by
// assuming the viewer played sequentially and stopped inside the last
// bucket reached.
struct SoftLabels {
  std::vector<double> values;
  // t exceeded the last endpoint; every label was set to 1.
  bool clipped = false;
};

SoftLabels encode(const BucketScheme& scheme, std::int64_t t);

// Writes the labels into `out` (size must equal scheme.size()) and returns
// whether t was clipped. Allocation-free variant used by training.
bool encode_into(const BucketScheme& scheme, std::int64_t t,
                 std::span<double> out);

// Labels from logged per-bucket watch times: t_k / width(k).
std::vector<double> labels_from_bucket_times(
    const BucketScheme& scheme, std::span<const std::int64_t> bucket_times);

// Inverse of encode for non-clipped labels. Throws std::invalid_argument if
// the labels are not of the form (1, ..., 1, f, 0, ..., 0).
std::int64_t decode(const BucketScheme& scheme, const SoftLabels& labels);

}  // namespace swat
