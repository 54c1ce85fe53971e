#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "swat/buckets.hpp"
#include "swat/heads.hpp"

namespace swat {

// |a - b| / max(1, |a|, |b|).
double gradient_error(double analytic, double numeric);

// Central differences of f at x with step h.
std::vector<double> numeric_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double h = 1e-6);

// Random scheme with n_min..n_max buckets of width w_min..w_max.
BucketScheme random_scheme(std::mt19937_64& rng, std::size_t n_min,
                           std::size_t n_max, std::int64_t w_min,
                           std::int64_t w_max, bool tail_open);

struct VerifyOptions {
  std::size_t trials = 100;
  std::uint64_t seed = 0;
  // Test hook: flips the sign of this head's analytic gradient so the
  // gradient checks must fail.
  std::optional<HeadKind> corrupt_gradient;
};

struct PropertyResult {
  std::string name;
  bool passed = true;
  std::size_t checks = 0;
  std::size_t failures = 0;
  double worst = 0.0;  // largest observed error or violation
  std::string detail;
};

struct VerifyReport {
  std::vector<PropertyResult> properties;

  bool passed() const;
  std::vector<std::string> failed() const;
};

// Runs the self-contained property suite: per-head gradient checks against
// finite differences, gradient bounds, closed-form geometric mean against
// enumeration, the uniform-probability reduction, label round trips, the
// total-mass diagnostic and end-to-end model gradients.
VerifyReport run_verification(const VerifyOptions& options);

nlohmann::json to_json(const VerifyReport& report);

}  // namespace swat
