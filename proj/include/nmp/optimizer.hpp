#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "nmp/nn.hpp"

namespace nmp {

// RMSProp:  acc <- rho acc + (1 - rho) g^2 ;  p <- p - lr g / sqrt(acc + eps)
// The accumulator for each parameter is keyed by name and created lazily with
// the parameter's shape.
class Rmsprop {
 public:
  explicit Rmsprop(double learning_rate = 0.0005, double decay = 0.9,
                   double epsilon = 1e-8)
      : lr_(learning_rate), decay_(decay), eps_(epsilon) {}

  void step(const std::string& name, Param& p) {
    auto [it, inserted] = acc_.try_emplace(name, p.value.rows, p.value.cols);
    Tensor2& acc = it->second;
    if (!acc.same_shape(p.value) || !p.grad.same_shape(p.value))
      throw std::invalid_argument("rmsprop: shape mismatch for " + name);
    for (std::size_t i = 0; i < p.value.data.size(); ++i) {
      const double g = p.grad.data[i];
      acc.data[i] = decay_ * acc.data[i] + (1.0 - decay_) * g * g;
      p.value.data[i] -= lr_ * g / std::sqrt(acc.data[i] + eps_);
    }
  }

  double learning_rate() const { return lr_; }
  double decay() const { return decay_; }
  double epsilon() const { return eps_; }

  const Tensor2* accumulator(const std::string& name) const {
    auto it = acc_.find(name);
    return it == acc_.end() ? nullptr : &it->second;
  }

 private:
  double lr_, decay_, eps_;
  std::map<std::string, Tensor2> acc_;
};

}  // namespace nmp
