#include "swat/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace swat {

AdamW::AdamW(std::size_t num_params, AdamWOptions options)
    : options_(options), m_(num_params, 0.0), v_(num_params, 0.0) {
  if (!(options_.lr > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  if (!(options_.beta1 >= 0.0 && options_.beta1 < 1.0) ||
      !(options_.beta2 >= 0.0 && options_.beta2 < 1.0)) {
    throw std::invalid_argument("Adam betas must lie in [0, 1)");
  }
  if (options_.weight_decay < 0.0) throw std::invalid_argument("weight decay must be >= 0");
}

void AdamW::step(std::span<double> params, std::span<const double> grads) {
  if (params.size() != m_.size() || grads.size() != m_.size()) {
    throw std::invalid_argument("AdamW::step: size mismatch");
  }
  ++step_;
  const auto& o = options_;
  const double bc1 = 1.0 - std::pow(o.beta1, static_cast<double>(step_));
  const double bc2 = 1.0 - std::pow(o.beta2, static_cast<double>(step_));
  const double decay = 1.0 - o.lr * o.weight_decay;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    m_[i] = o.beta1 * m_[i] + (1.0 - o.beta1) * g;
    v_[i] = o.beta2 * v_[i] + (1.0 - o.beta2) * g * g;
    const double m_hat = m_[i] / bc1;
    const double v_hat = v_[i] / bc2;
    params[i] = params[i] * decay - o.lr * m_hat / (std::sqrt(v_hat) + o.eps);
  }
}

}  // namespace swat
