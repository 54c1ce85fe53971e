#include "swat/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <stdexcept>
#include <string>

namespace swat {

std::uint64_t hash_token(std::string_view token, std::uint64_t seed) {
  // FNV-1a over the seed bytes then the token.
  std::uint64_t h = 14695981039346656037ull;
  const auto mix = [&h](unsigned char byte) {
    h ^= byte;
    h *= 1099511628211ull;
  };
  for (int i = 0; i < 8; ++i) mix(static_cast<unsigned char>(seed >> (8 * i)));
  for (char ch : token) mix(static_cast<unsigned char>(ch));
  return h;
}

SparseVector featurize(const FeatureSpec& spec, const Sample& sample) {
  if (spec.hash_dim < 2) throw std::invalid_argument("hash_dim must be >= 2");
  if (sample.numeric.size() != spec.numeric_dims) {
    throw std::invalid_argument("sample has " + std::to_string(sample.numeric.size()) +
                                " numeric features, spec expects " +
                                std::to_string(spec.numeric_dims));
  }
  std::map<std::uint32_t, double> pooled;
  if (!sample.categorical_ids.empty()) {
    const double w = 1.0 / static_cast<double>(sample.categorical_ids.size());
    for (const auto& token : sample.categorical_ids) {
      pooled[static_cast<std::uint32_t>(hash_token(token, spec.hash_seed) %
                                        spec.hash_dim)] += w;
    }
  }
  SparseVector x;
  x.index.reserve(pooled.size() + spec.numeric_dims);
  x.value.reserve(pooled.size() + spec.numeric_dims);
  for (const auto& [idx, v] : pooled) {
    x.index.push_back(idx);
    x.value.push_back(v);
  }
  for (std::uint32_t j = 0; j < spec.numeric_dims; ++j) {
    x.index.push_back(spec.hash_dim + j);
    x.value.push_back(sample.numeric[j]);
  }
  return x;
}

Model::Model(std::size_t input_dim, std::size_t hidden, std::size_t output,
             std::uint64_t init_seed)
    : input_(input_dim), hidden_(hidden), output_(output) {
  if (input_dim == 0 || output == 0) {
    throw std::invalid_argument("model needs non-zero input and output sizes");
  }
  const std::size_t n = hidden_ ? input_ * hidden_ + hidden_ + hidden_ * output_ + output_
                                : input_ * output_ + output_;
  params_.assign(n, 0.0);
  std::mt19937_64 rng(init_seed);
  const auto fill = [&rng, this](std::size_t offset, std::size_t count,
                                 std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> u(-bound, bound);
    for (std::size_t i = 0; i < count; ++i) params_[offset + i] = u(rng);
  };
  fill(w_in(), input_ * first_width(), input_);
  if (hidden_) fill(w_out(), hidden_ * output_, hidden_);
}

void Model::set_params(std::vector<double> params) {
  if (params.size() != params_.size()) {
    throw std::invalid_argument("model expects " + std::to_string(params_.size()) +
                                " parameters, got " + std::to_string(params.size()));
  }
  params_ = std::move(params);
}

void Model::check_input(const SparseVector& x) const {
  if (x.index.size() != x.value.size()) {
    throw std::invalid_argument("sparse input: index/value size mismatch");
  }
  if (!x.index.empty() && x.index.back() >= input_) {
    throw std::invalid_argument("input index " + std::to_string(x.index.back()) +
                                " outside input dimension " + std::to_string(input_));
  }
}

Model::Activations Model::forward(const SparseVector& x) const {
  check_input(x);
  const std::size_t width = first_width();
  std::vector<double> first(params_.begin() + static_cast<std::ptrdiff_t>(b_in()),
                            params_.begin() + static_cast<std::ptrdiff_t>(b_in() + width));
  for (std::size_t k = 0; k < x.index.size(); ++k) {
    const double* row = &params_[w_in() + x.index[k] * width];
    const double v = x.value[k];
    for (std::size_t j = 0; j < width; ++j) first[j] += row[j] * v;
  }
  Activations acts;
  if (!hidden_) {
    acts.logits = std::move(first);
    return acts;
  }
  acts.logits.assign(params_.begin() + static_cast<std::ptrdiff_t>(b_out()),
                     params_.begin() + static_cast<std::ptrdiff_t>(b_out() + output_));
  for (std::size_t h = 0; h < hidden_; ++h) {
    const double a = std::max(first[h], 0.0);
    if (a == 0.0) continue;
    const double* row = &params_[w_out() + h * output_];
    for (std::size_t o = 0; o < output_; ++o) acts.logits[o] += row[o] * a;
  }
  acts.hidden_pre = std::move(first);
  return acts;
}

void Model::backward(const SparseVector& x, const Activations& acts,
                     std::span<const double> dlogits, double scale,
                     std::span<double> grad) const {
  if (dlogits.size() != output_ || grad.size() != params_.size()) {
    throw std::invalid_argument("backward: gradient buffer size mismatch");
  }
  std::vector<double> dfirst;
  if (hidden_) {
    for (std::size_t o = 0; o < output_; ++o) grad[b_out() + o] += scale * dlogits[o];
    dfirst.assign(hidden_, 0.0);
    for (std::size_t h = 0; h < hidden_; ++h) {
      const double pre = acts.hidden_pre[h];
      if (pre <= 0.0) continue;
      double* grow = &grad[w_out() + h * output_];
      const double* prow = &params_[w_out() + h * output_];
      double acc = 0.0;
      for (std::size_t o = 0; o < output_; ++o) {
        grow[o] += scale * dlogits[o] * pre;
        acc += prow[o] * dlogits[o];
      }
      dfirst[h] = acc;
    }
  } else {
    dfirst.assign(dlogits.begin(), dlogits.end());
  }
  const std::size_t width = first_width();
  for (std::size_t j = 0; j < width; ++j) grad[b_in() + j] += scale * dfirst[j];
  for (std::size_t k = 0; k < x.index.size(); ++k) {
    double* row = &grad[w_in() + x.index[k] * width];
    const double v = scale * x.value[k];
    for (std::size_t j = 0; j < width; ++j) row[j] += dfirst[j] * v;
  }
}

HeadOutput forward(const Model& model, const SparseVector& x) {
  return HeadOutput::from_logits(model.forward(x).logits);
}

}  // namespace swat
