#include "swat/labels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace swat {

bool encode_into(const BucketScheme& scheme, std::int64_t t,
                 std::span<double> out) {
  if (out.size() != scheme.size()) {
    throw std::invalid_argument("encode: label buffer has " +
                                std::to_string(out.size()) + " slots, scheme has " +
                                std::to_string(scheme.size()) + " buckets");
  }
  if (t < 0) throw std::invalid_argument("encode: negative watch time");
  for (std::size_t k = 0; k < scheme.size(); ++k) {
    const auto lo = scheme.lower(k);
    const auto hi = scheme.upper(k);
    if (t <= lo) {
      out[k] = 0.0;
    } else if (t > hi) {
      out[k] = 1.0;
    } else {
      out[k] = static_cast<double>(t - lo) / static_cast<double>(hi - lo);
    }
  }
  return t > scheme.last();
}

SoftLabels encode(const BucketScheme& scheme, std::int64_t t) {
  SoftLabels labels;
  labels.values.resize(scheme.size());
  labels.clipped = encode_into(scheme, t, labels.values);
  return labels;
}

std::vector<double> labels_from_bucket_times(
    const BucketScheme& scheme, std::span<const std::int64_t> bucket_times) {
  if (bucket_times.size() != scheme.size()) {
    throw std::invalid_argument("bucket times: expected " +
                                std::to_string(scheme.size()) + " values, got " +
                                std::to_string(bucket_times.size()));
  }
  std::vector<double> out(scheme.size());
  for (std::size_t k = 0; k < scheme.size(); ++k) {
    const auto w = scheme.width(k);
    if (bucket_times[k] < 0 || bucket_times[k] > w) {
      throw std::invalid_argument("bucket times: value " +
                                  std::to_string(bucket_times[k]) +
                                  " outside [0, " + std::to_string(w) + "]");
    }
    out[k] = static_cast<double>(bucket_times[k]) / static_cast<double>(w);
  }
  return out;
}

std::int64_t decode(const BucketScheme& scheme, const SoftLabels& labels) {
  const auto& v = labels.values;
  if (v.size() != scheme.size()) {
    throw std::invalid_argument("decode: label count does not match scheme");
  }
  int fractional = 0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!(v[k] >= 0.0 && v[k] <= 1.0)) {
      throw std::invalid_argument("decode: label " + std::to_string(k) +
                                  " outside [0, 1]");
    }
    if (k > 0 && v[k] > v[k - 1]) {
      throw std::invalid_argument("decode: labels increase at bucket " +
                                  std::to_string(k));
    }
    if (v[k] > 0.0 && v[k] < 1.0 && ++fractional > 1) {
      throw std::invalid_argument("decode: more than one partial bucket");
    }
  }
  std::size_t last = v.size();
  for (std::size_t k = v.size(); k-- > 0;) {
    if (v[k] > 0.0) {
      last = k;
      break;
    }
  }
  if (last == v.size()) return 0;
  return scheme.lower(last) +
         std::llround(v[last] * static_cast<double>(scheme.width(last)));
}

}  // namespace swat
