#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "swat/dataio.hpp"
#include "swat/heads.hpp"

namespace swat {

// Hashed mean-pooled one-hot features followed by raw numeric features.
struct FeatureSpec {
  std::uint32_t hash_dim = 1u << 15;
  std::uint32_t numeric_dims = 0;
  std::uint64_t hash_seed = 0;

  std::size_t input_dim() const { return std::size_t{hash_dim} + numeric_dims; }
};

struct SparseVector {
  std::vector<std::uint32_t> index;  // strictly increasing
  std::vector<double> value;
};

std::uint64_t hash_token(std::string_view token, std::uint64_t seed);

SparseVector featurize(const FeatureSpec& spec, const Sample& sample);

// Feed-forward network: input -> [affine -> relu]? -> affine -> logits.
// Input weights are stored input-major so that a sparse input touches
// contiguous rows.
class Model {
 public:
  Model() = default;
  // hidden = 0 gives a single affine layer. Weights uniform in
  // +-1/sqrt(fan_in) from `init_seed`, biases zero.
  Model(std::size_t input_dim, std::size_t hidden, std::size_t output,
        std::uint64_t init_seed);

  std::size_t input_dim() const { return input_; }
  std::size_t hidden() const { return hidden_; }
  std::size_t output() const { return output_; }

  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::size_t num_params() const { return params_.size(); }

  void set_params(std::vector<double> params);

  struct Activations {
    std::vector<double> hidden_pre;  // before relu
    std::vector<double> logits;
  };

  Activations forward(const SparseVector& x) const;

  // Adds scale * d loss / d params into `grad` given d loss / d logits.
  void backward(const SparseVector& x, const Activations& acts,
                std::span<const double> dlogits, double scale,
                std::span<double> grad) const;

 private:
  // Offsets into params_.
  std::size_t w_in() const { return 0; }
  std::size_t b_in() const { return input_ * first_width(); }
  std::size_t w_out() const { return b_in() + first_width(); }
  std::size_t b_out() const { return w_out() + hidden_ * output_; }
  std::size_t first_width() const { return hidden_ ? hidden_ : output_; }

  void check_input(const SparseVector& x) const;

  std::size_t input_ = 0;
  std::size_t hidden_ = 0;
  std::size_t output_ = 0;
  std::vector<double> params_;
};

HeadOutput forward(const Model& model, const SparseVector& x);

}  // namespace swat
