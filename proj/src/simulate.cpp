#include "swat/simulate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace swat {
namespace {

constexpr std::int64_t kMaxTailSteps = 50'000'000;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument("behavior profile: " + what);
}

void check_focused_arity(std::span<const double> probs,
                         const BucketScheme& scheme) {
  if (probs.size() != scheme.size() + 1) {
    throw std::invalid_argument("expected " + std::to_string(scheme.size() + 1) +
                                " probabilities (N buckets + tail), got " +
                                std::to_string(probs.size()));
  }
  if (!(probs.back() < 1.0)) {
    throw std::invalid_argument("tail probability must be < 1");
  }
}

// Bucket whose continue probability governs second s >= 1.
std::size_t bucket_of_second(const BucketScheme& scheme, std::int64_t s) {
  return scheme.open_index(s);
}

}  // namespace

BehaviorSampler::BehaviorSampler(BehaviorProfile profile)
    : profile_(std::move(profile)), rng_(profile_.seed) {
  for (double p : profile_.probs) require(p >= 0.0 && p <= 1.0, "probabilities must lie in [0, 1]");
  switch (profile_.kind) {
    case Behavior::Wandering:
      require(profile_.scheme.has_value(), "wandering behavior needs a scheme");
      require(profile_.probs.size() == profile_.scheme->size(),
              "wandering behavior needs one probability per bucket");
      break;
    case Behavior::Focused:
      require(profile_.scheme.has_value(), "focused behavior needs a scheme");
      require(profile_.probs.size() == profile_.scheme->size() + 1,
              "focused behavior needs N + 1 probabilities");
      require(profile_.probs.back() < 1.0, "focused tail probability must be < 1");
      break;
    case Behavior::Stationary:
      require(profile_.probs.size() == 1, "stationary behavior needs one probability");
      require(profile_.probs[0] < 1.0, "stationary probability must be < 1");
      break;
  }
}

WanderingDraw BehaviorSampler::draw_wandering() {
  if (profile_.kind != Behavior::Wandering) {
    throw std::logic_error("draw_wandering on a non-wandering profile");
  }
  const auto& scheme = *profile_.scheme;
  WanderingDraw d;
  d.per_bucket.resize(scheme.size());
  for (std::size_t k = 0; k < scheme.size(); ++k) {
    const std::int64_t w = scheme.width(k);
    const double p = profile_.probs[k];
    std::int64_t seconds = 0;
    if (p >= 1.0) {
      seconds = w;
    } else if (p > 0.0) {
      seconds = std::binomial_distribution<std::int64_t>(w, p)(rng_);
    }
    d.per_bucket[k] = seconds;
    d.total += seconds;
  }
  return d;
}

std::int64_t BehaviorSampler::run_length(double p, std::int64_t cap) {
  if (p <= 0.0) return 0;
  if (p >= 1.0) {
    if (cap < 0) throw std::logic_error("unbounded run with p = 1");
    return cap;
  }
  // Failures-before-success with success = "stop" (probability 1 - p).
  const auto g = std::geometric_distribution<std::int64_t>(1.0 - p)(rng_);
  return cap >= 0 && g > cap ? cap : g;
}

std::int64_t BehaviorSampler::draw_focused() {
  if (profile_.kind != Behavior::Focused) {
    throw std::logic_error("draw_focused on a non-focused profile");
  }
  const auto& scheme = *profile_.scheme;
  // The process is memoryless, so each bucket's seconds are a capped run of
  // continues: stopping inside the bucket ends the draw.
  std::int64_t t = 0;
  for (std::size_t k = 0; k < scheme.size(); ++k) {
    const std::int64_t w = scheme.width(k);
    const std::int64_t run = run_length(profile_.probs[k], w);
    if (run < w) return t + run;
    // All w seconds watched; the decision for second x_k + 1 is drawn with
    // the next bucket's probability.
    t += w;
  }
  return t + run_length(profile_.probs.back(), -1);
}

std::int64_t BehaviorSampler::draw_stationary() {
  if (profile_.kind != Behavior::Stationary) {
    throw std::logic_error("draw_stationary on a non-stationary profile");
  }
  return run_length(profile_.probs[0], -1);
}

std::int64_t BehaviorSampler::draw_total() {
  switch (profile_.kind) {
    case Behavior::Wandering: return draw_wandering().total;
    case Behavior::Focused: return draw_focused();
    case Behavior::Stationary: return draw_stationary();
  }
  return 0;
}

Moments enumerate_bucket_geometric(std::span<const double> probs,
                                   const BucketScheme& scheme,
                                   double tail_cutoff) {
  check_focused_arity(probs, scheme);
  Moments m;
  // survive = prod_{s=1..t} p_{bucket of s} in the pmf's own charging:
  // the pmf at t uses the bucket that contains t (t = 0 -> bucket 0).
  double survive = 1.0;
  std::int64_t t = 0;
  const std::int64_t last = scheme.last();
  for (; t <= last; ++t) {
    if (t > 0) survive *= probs[bucket_of_second(scheme, t)];
    const double stop = 1.0 - probs[scheme.open_index(t)];
    const double pmf = survive * stop;
    m.mass += pmf;
    m.mean += static_cast<double>(t) * pmf;
  }
  // Tail bucket: pmf(t) = survive(x_N) q^{t - x_N} (1 - q).
  const double q = probs.back();
  --t;
  for (std::int64_t step = 0; survive * q >= tail_cutoff && step < kMaxTailSteps; ++step) {
    ++t;
    survive *= q;
    const double pmf = survive * (1.0 - q);
    m.mass += pmf;
    m.mean += static_cast<double>(t) * pmf;
  }
  // Remaining mass survive * q spread as T = t + 1 + Geometric.
  const double rest = survive * q;
  m.mass += rest;
  m.mean += rest * (static_cast<double>(t) + 1.0 / (1.0 - q));
  return m;
}

double total_mass(std::span<const double> probs, const BucketScheme& scheme) {
  return enumerate_bucket_geometric(probs, scheme, 1.0).mass;
}

double focused_process_pmf(std::span<const double> probs,
                           const BucketScheme& scheme, std::int64_t t) {
  check_focused_arity(probs, scheme);
  if (t < 0) return 0.0;
  double log_pmf = 0.0;
  for (std::int64_t s = 1; s <= t; ++s) {
    log_pmf += std::log(probs[bucket_of_second(scheme, s)]);
  }
  return std::exp(log_pmf) * (1.0 - probs[bucket_of_second(scheme, t + 1)]);
}

Moments enumerate_focused_process(std::span<const double> probs,
                                  const BucketScheme& scheme,
                                  double tail_cutoff) {
  check_focused_arity(probs, scheme);
  Moments m;
  double survive = 1.0;  // prod_{s=1..t} p_{bucket(s)}
  const double q = probs.back();
  std::int64_t t = 0;
  for (;; ++t) {
    if (t > 0) survive *= probs[bucket_of_second(scheme, t)];
    const double pmf = survive * (1.0 - probs[bucket_of_second(scheme, t + 1)]);
    m.mass += pmf;
    m.mean += static_cast<double>(t) * pmf;
    if (t >= scheme.last() &&
        (survive * q < tail_cutoff || t - scheme.last() > kMaxTailSteps)) {
      break;
    }
  }
  const double rest = survive * q;
  m.mass += rest;
  m.mean += rest * (static_cast<double>(t) + 1.0 / (1.0 - q));
  return m;
}

}  // namespace swat
