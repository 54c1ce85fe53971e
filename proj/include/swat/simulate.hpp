#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "swat/buckets.hpp"

namespace swat {

enum class Behavior {
  Wandering,   // independent Binomial(width, p_k) seconds in every bucket
  Focused,     // sequential watching, per-bucket continue probability
  Stationary,  // sequential watching, one continue probability
};

struct BehaviorProfile {
  Behavior kind = Behavior::Stationary;
  std::optional<BucketScheme> scheme;
  // N for Wandering, N + 1 for Focused (last entry is the tail bucket), 1 for
  // Stationary.
  std::vector<double> probs;
  std::uint64_t seed = 0;
};

struct WanderingDraw {
  std::int64_t total = 0;
  std::vector<std::int64_t> per_bucket;
};

// One independent draw stream per sampler; identical profile and seed give
// identical streams.
class BehaviorSampler {
 public:
  explicit BehaviorSampler(BehaviorProfile profile);

  WanderingDraw draw_wandering();

  // Per-second process: at second s the viewer continues with probability
  // p_{bucket(s)}, otherwise stops with T = s - 1.
  std::int64_t draw_focused();

  std::int64_t draw_stationary();

  // Dispatches on the profile kind.
  std::int64_t draw_total();

  const BehaviorProfile& profile() const { return profile_; }

 private:
  // Number of continues before the first stop, capped at `cap` (cap < 0 means
  // unbounded). Returns cap when the cap is reached without stopping.
  std::int64_t run_length(double p, std::int64_t cap);

  BehaviorProfile profile_;
  std::mt19937_64 rng_;
};

struct Moments {
  double mass = 0.0;
  double mean = 0.0;
};

// Brute-force moments of the bucketized geometric pmf
//   p_n^{t - x_{n-1}} (1 - p_n) prod_{j<n} p_j^{width(j)},
// evaluated second by second. Enumeration runs past x_N until the remaining
// tail mass drops below tail_cutoff, after which the remaining geometric tail
// is added in closed form.
Moments enumerate_bucket_geometric(std::span<const double> probs,
                                   const BucketScheme& scheme,
                                   double tail_cutoff = 1e-12);

// Sum over t >= 0 of the bucketized geometric pmf. Equals 1 for uniform
// probabilities; generally not 1 because a stop at t = x_n is charged to
// bucket n rather than bucket n + 1.
double total_mass(std::span<const double> probs, const BucketScheme& scheme);

// Exact pmf of the per-second focused process:
//   prod_{s=1..t} p_{bucket(s)} * (1 - p_{bucket(t + 1)}).
double focused_process_pmf(std::span<const double> probs,
                           const BucketScheme& scheme, std::int64_t t);

// Moments of the focused process by enumeration (always normalized).
Moments enumerate_focused_process(std::span<const double> probs,
                                  const BucketScheme& scheme,
                                  double tail_cutoff = 1e-12);

}  // namespace swat
