#pragma once

// Reference computations used by the tests. They work second by second from
// the raw endpoint list and never call into the heads or simulate code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace swat::oracle {

// 1-based bucket of second s >= 1 over endpoints x_1 < ... < x_N; N + 1
// past the last endpoint.
inline std::size_t bucket_of_second(const std::vector<std::int64_t>& x, std::int64_t s) {
  std::size_t k = 1;
  while (k <= x.size() && s > x[k - 1]) ++k;
  return k;
}

// Bucket used for the stop factor of watch time t (t = 0 is in bucket 1).
inline std::size_t bucket_of_time(const std::vector<std::int64_t>& x, std::int64_t t) {
  return t == 0 ? 1 : bucket_of_second(x, t);
}

// Bucketized-geometric pmf as a product of per-second continue factors and
// the stop factor of t's own bucket. probs has N + 1 entries.
inline double bucket_geometric_pmf(const std::vector<double>& probs,
                                   const std::vector<std::int64_t>& x, std::int64_t t) {
  double v = 1.0;
  for (std::int64_t s = 1; s <= t; ++s) v *= probs[bucket_of_second(x, s) - 1];
  return v * (1.0 - probs[bucket_of_time(x, t) - 1]);
}

struct Sums {
  double mass = 0.0;
  double mean = 0.0;
};

// Sum of pmf and t * pmf up to the point where the mass left beyond t drops
// below cutoff, then the remainder of the tail geometric in closed form.
inline Sums bucket_geometric_sums(const std::vector<double>& probs,
                                  const std::vector<std::int64_t>& x,
                                  double cutoff = 1e-12) {
  Sums s;
  const double q = probs.back();
  double survive = 1.0;  // probability of watching past second t
  for (std::int64_t t = 0;; ++t) {
    const double pmf = survive * (1.0 - probs[bucket_of_time(x, t) - 1]);
    s.mass += pmf;
    s.mean += static_cast<double>(t) * pmf;
    survive *= probs[bucket_of_second(x, t + 1) - 1];
    if (t >= x.back() && survive < cutoff) {
      s.mass += survive;
      s.mean += survive * (static_cast<double>(t) + 1.0 / (1.0 - q));
      return s;
    }
  }
}

// Sequential per-second process: continue through second s with the
// probability of s's bucket, stop before second t + 1 with that bucket's
// stop probability.
inline double process_pmf(const std::vector<double>& probs,
                          const std::vector<std::int64_t>& x, std::int64_t t) {
  double v = 1.0;
  for (std::int64_t s = 1; s <= t; ++s) v *= probs[bucket_of_second(x, s) - 1];
  return v * (1.0 - probs[bucket_of_second(x, t + 1) - 1]);
}

// Element at 1-based index ceil(q * n / 100) of the sorted targets, integer q.
inline std::int64_t percentile(std::vector<std::int64_t> v, int q) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  const std::size_t idx = (static_cast<std::size_t>(q) * n + 99) / 100;
  return v[std::max<std::size_t>(idx, 1) - 1];
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double sa = 0, sb = 0, sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sa += a[i];
    sb += b[i];
    sab += a[i] * b[i];
    saa += a[i] * a[i];
    sbb += b[i] * b[i];
  }
  return (n * sab - sa * sb) / std::sqrt((n * saa - sa * sa) * (n * sbb - sb * sb));
}

}  // namespace swat::oracle
