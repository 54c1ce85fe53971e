#include "swat/buckets.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace swat {
namespace {

std::string describe(std::span<const std::int64_t> values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    if (i == 8 && values.size() > 10) {
      out += "... (" + std::to_string(values.size()) + " values)";
      break;
    }
    out += std::to_string(values[i]);
  }
  return out + "]";
}

std::vector<std::int64_t> normalize(std::vector<std::int64_t> v) {
  std::erase_if(v, [](std::int64_t x) { return x <= 0; });
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// Element at 1-based index ceil(q n / 100) of a sorted sample.
std::int64_t percentile_of_sorted(std::span<const std::int64_t> sorted,
                                  double q) {
  const auto n = static_cast<double>(sorted.size());
  // The small slack keeps e.g. 10 * 100 / 100 from landing on 10.000000001.
  auto idx = static_cast<std::int64_t>(std::ceil(q * n / 100.0 - 1e-9));
  idx = std::clamp<std::int64_t>(idx, 1, static_cast<std::int64_t>(sorted.size()));
  return sorted[static_cast<std::size_t>(idx - 1)];
}

// Percentile grid step, 2 step, ... up to and including `stop`.
void append_grid(std::span<const std::int64_t> sorted, double step,
                 double stop, std::vector<std::int64_t>& out) {
  if (sorted.empty()) return;
  for (int k = 1;; ++k) {
    const double q = k * step;
    if (q >= stop - 1e-9) break;
    out.push_back(percentile_of_sorted(sorted, q));
  }
  out.push_back(percentile_of_sorted(sorted, stop));
}

std::vector<std::int64_t> sorted_copy(std::span<const std::int64_t> targets) {
  std::vector<std::int64_t> s(targets.begin(), targets.end());
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

BucketScheme BucketScheme::from_endpoints(std::span<const std::int64_t> raw,
                                          bool tail_open) {
  if (raw.empty()) {
    throw std::invalid_argument("bucket endpoints: empty input");
  }
  auto endpoints = normalize({raw.begin(), raw.end()});
  if (endpoints.empty()) {
    throw std::invalid_argument("bucket endpoints: no positive value in " +
                                describe(raw));
  }
  return BucketScheme(std::move(endpoints), tail_open);
}

BucketScheme BucketScheme::from_percentiles(
    std::span<const std::int64_t> targets, double percent_step,
    bool tail_open) {
  if (targets.empty()) {
    throw std::invalid_argument("percentile buckets: empty target list");
  }
  if (!(percent_step > 0.0 && percent_step <= 50.0)) {
    throw std::invalid_argument("percentile buckets: step must be in (0, 50], got " +
                                std::to_string(percent_step));
  }
  const auto sorted = sorted_copy(targets);
  std::vector<std::int64_t> raw;
  append_grid(sorted, percent_step, 100.0, raw);
  return from_endpoints(raw, tail_open);
}

BucketScheme BucketScheme::ablation_choice(
    std::span<const std::int64_t> targets, int choice, bool tail_open) {
  switch (choice) {
    case 1: return from_percentiles(targets, 5.0, tail_open);
    case 2: return from_percentiles(targets, 2.0, tail_open);
    case 3: return from_percentiles(targets, 1.0, tail_open);
    case 4: case 5: case 6: break;
    default:
      throw std::invalid_argument("bucket choice must be in 1..6, got " +
                                  std::to_string(choice));
  }
  if (targets.empty()) {
    throw std::invalid_argument("ablation buckets: empty target list");
  }
  const double head_step = choice == 6 ? 1.0 : 2.0;
  const double cut = choice == 6 ? 90.0 : 96.0;
  const double tail_step = choice == 4 ? 5.0 : (choice == 5 ? 2.0 : 1.0);

  const auto sorted = sorted_copy(targets);
  std::vector<std::int64_t> raw;
  append_grid(sorted, head_step, cut, raw);

  // Remaining top share of the data: everything past the cut percentile.
  const auto n = static_cast<double>(sorted.size());
  const auto cut_idx =
      static_cast<std::size_t>(std::ceil(cut * n / 100.0 - 1e-9));
  if (cut_idx < sorted.size()) {
    std::span<const std::int64_t> top(sorted.begin() + cut_idx, sorted.end());
    append_grid(top, tail_step, 100.0, raw);
  }
  return from_endpoints(raw, tail_open);
}

BucketScheme::Location BucketScheme::bucket_of(std::int64_t t) const {
  const std::size_t k = open_index(t);
  if (k < endpoints_.size() || tail_open_) return {k, false};
  return {endpoints_.size() - 1, true};
}

std::size_t BucketScheme::open_index(std::int64_t t) const {
  // First endpoint >= t; t = 0 lands in bucket 0 since all endpoints are >= 1.
  return static_cast<std::size_t>(
      std::lower_bound(endpoints_.begin(), endpoints_.end(), t) -
      endpoints_.begin());
}

std::vector<std::int64_t> parse_endpoint_list(std::string_view text) {
  std::vector<std::int64_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    auto token = text.substr(pos, comma == std::string_view::npos
                                      ? std::string_view::npos
                                      : comma - pos);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    if (token.empty()) {
      throw std::invalid_argument("endpoint list: empty entry in '" +
                                  std::string(text) + "'");
    }
    std::size_t used = 0;
    std::int64_t value = 0;
    try {
      value = std::stoll(std::string(token), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) {
      throw std::invalid_argument("endpoint list: '" + std::string(token) +
                                  "' is not an integer");
    }
    out.push_back(value);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

nlohmann::json to_json(const BucketScheme& scheme) {
  return {{"endpoints", scheme.endpoints()}, {"tail_open", scheme.tail_open()}};
}

BucketScheme scheme_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("endpoints")) {
    throw std::invalid_argument("scheme JSON: missing \"endpoints\"");
  }
  const auto endpoints = j.at("endpoints").get<std::vector<std::int64_t>>();
  const bool tail_open = j.value("tail_open", false);
  return BucketScheme::from_endpoints(endpoints, tail_open);
}

}  // namespace swat
