#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "json.hpp"

namespace swat {

double mae(std::span<const double> preds, std::span<const double> targets);

// Pairwise ordering accuracy. Evaluates every unordered pair when
// n (n - 1) / 2 <= pair_budget, otherwise pair_budget pairs drawn uniformly
// with the given seed. A pair scores 1 if prediction and target order agree,
// 0.5 if either side is tied, 0 otherwise.
struct XaucResult {
  double value = 0.0;
  std::uint64_t pairs = 0;
};
XaucResult xauc(std::span<const double> preds, std::span<const double> targets,
                std::uint64_t pair_budget, std::uint64_t seed);

// All pairs up to n = 2000, otherwise min(10 n, 1e6) sampled pairs.
std::uint64_t default_pair_budget(std::size_t n);

// Sample Pearson correlation. Throws if either vector is constant.
double pearson(std::span<const double> preds, std::span<const double> targets);

struct EvalReport {
  double mae = 0.0;
  double xauc = 0.0;
  double pearson = 0.0;  // NaN when undefined (constant predictions)
  std::size_t n = 0;
  std::uint64_t xauc_pairs = 0;
  std::uint64_t seed = 0;
};

EvalReport evaluate(std::span<const double> preds,
                    std::span<const double> targets, std::uint64_t pair_budget,
                    std::uint64_t seed);

nlohmann::json to_json(const EvalReport& report);
std::string format_table(const EvalReport& report);

}  // namespace swat
