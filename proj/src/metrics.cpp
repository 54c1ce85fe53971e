#include "swat/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <iomanip>

namespace swat {
namespace {

void check_pair(std::span<const double> preds, std::span<const double> targets,
                std::size_t min_n, const char* what) {
  if (preds.size() != targets.size()) {
    throw std::invalid_argument(std::string(what) + ": " +
                                std::to_string(preds.size()) + " predictions vs " +
                                std::to_string(targets.size()) + " targets");
  }
  if (preds.size() < min_n) {
    throw std::invalid_argument(std::string(what) + ": needs at least " +
                                std::to_string(min_n) + " samples");
  }
}

int sign(double x) { return (x > 0.0) - (x < 0.0); }

double pair_score(double pa, double pb, double ta, double tb) {
  const int sp = sign(pa - pb);
  const int st = sign(ta - tb);
  if (sp == 0 || st == 0) return 0.5;
  return sp == st ? 1.0 : 0.0;
}

}  // namespace

double mae(std::span<const double> preds, std::span<const double> targets) {
  check_pair(preds, targets, 1, "mae");
  double sum = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    sum += std::abs(preds[i] - targets[i]);
  }
  return sum / static_cast<double>(preds.size());
}

XaucResult xauc(std::span<const double> preds, std::span<const double> targets,
                std::uint64_t pair_budget, std::uint64_t seed) {
  check_pair(preds, targets, 2, "xauc");
  const std::uint64_t n = preds.size();
  const std::uint64_t all_pairs = n * (n - 1) / 2;
  double score = 0.0;
  XaucResult r;
  if (all_pairs <= pair_budget) {
    for (std::uint64_t a = 0; a < n; ++a) {
      for (std::uint64_t b = a + 1; b < n; ++b) {
        score += pair_score(preds[a], preds[b], targets[a], targets[b]);
      }
    }
    r.pairs = all_pairs;
  } else {
    if (pair_budget == 0) throw std::invalid_argument("xauc: pair budget is zero");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint64_t> first(0, n - 1);
    std::uniform_int_distribution<std::uint64_t> second(0, n - 2);
    for (std::uint64_t i = 0; i < pair_budget; ++i) {
      const auto a = first(rng);
      auto b = second(rng);
      if (b >= a) ++b;
      score += pair_score(preds[a], preds[b], targets[a], targets[b]);
    }
    r.pairs = pair_budget;
  }
  r.value = score / static_cast<double>(r.pairs);
  return r;
}

std::uint64_t default_pair_budget(std::size_t n) {
  if (n <= 2000) {
    return static_cast<std::uint64_t>(n) * (n > 0 ? n - 1 : 0) / 2;
  }
  return std::min<std::uint64_t>(10 * static_cast<std::uint64_t>(n), 1'000'000);
}

double pearson(std::span<const double> preds, std::span<const double> targets) {
  check_pair(preds, targets, 2, "pearson");
  const auto n = static_cast<double>(preds.size());
  double mp = 0.0, mt = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    mp += preds[i];
    mt += targets[i];
  }
  mp /= n;
  mt /= n;
  double cov = 0.0, vp = 0.0, vt = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double dp = preds[i] - mp;
    const double dt = targets[i] - mt;
    cov += dp * dt;
    vp += dp * dp;
    vt += dt * dt;
  }
  const auto constant = [](std::span<const double> v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *lo == *hi;
  };
  if (vp == 0.0 || vt == 0.0 || constant(preds) || constant(targets)) {
    throw std::domain_error("pearson: correlation undefined for a constant vector");
  }
  return std::clamp(cov / std::sqrt(vp * vt), -1.0, 1.0);
}

EvalReport evaluate(std::span<const double> preds,
                    std::span<const double> targets, std::uint64_t pair_budget,
                    std::uint64_t seed) {
  EvalReport r;
  r.n = preds.size();
  r.seed = seed;
  r.mae = mae(preds, targets);
  const auto x = xauc(preds, targets, pair_budget, seed);
  r.xauc = x.value;
  r.xauc_pairs = x.pairs;
  try {
    r.pearson = pearson(preds, targets);
  } catch (const std::domain_error&) {
    r.pearson = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

nlohmann::json to_json(const EvalReport& report) {
  nlohmann::json j = {{"mae", report.mae},
                      {"xauc", report.xauc},
                      {"n", report.n},
                      {"xauc_pairs", report.xauc_pairs},
                      {"seed", report.seed}};
  if (std::isnan(report.pearson)) {
    j["pearson"] = nullptr;
  } else {
    j["pearson"] = report.pearson;
  }
  return j;
}

std::string format_table(const EvalReport& report) {
  std::ostringstream os;
  os << std::left << std::setw(12) << "metric" << "value\n";
  os << std::setw(12) << "n" << report.n << '\n';
  os << std::setprecision(6) << std::fixed;
  os << std::setw(12) << "mae" << report.mae << '\n';
  os << std::setw(12) << "xauc" << report.xauc << '\n';
  os << std::setw(12) << "pearson";
  if (std::isnan(report.pearson)) {
    os << "n/a";
  } else {
    os << report.pearson;
  }
  os << '\n' << std::setw(12) << "xauc_pairs" << report.xauc_pairs << '\n';
  return os.str();
}

}  // namespace swat
