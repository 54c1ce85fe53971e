#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace swat {

struct AdamWOptions {
  double lr = 2e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // decoupled: applied as p -= lr * wd * p
};

// Adam with decoupled weight decay.
class AdamW {
 public:
  AdamW(std::size_t num_params, AdamWOptions options);

  void step(std::span<double> params, std::span<const double> grads);

  std::uint64_t steps() const { return step_; }
  const AdamWOptions& options() const { return options_; }
  std::span<const double> first_moment() const { return m_; }
  std::span<const double> second_moment() const { return v_; }

 private:
  AdamWOptions options_;
  std::vector<double> m_;
  std::vector<double> v_;
  std::uint64_t step_ = 0;
};

}  // namespace swat
