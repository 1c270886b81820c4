#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nmp/nn.hpp"

namespace nmp {

struct NamedParam {
  std::string name;
  Param* param = nullptr;
};

// Central-difference gradient check. `loss` must recompute the forward pass
// from the current parameter values; analytic gradients are read from
// Param::grad as left by a prior backward(). Returns the worst relative
// error  |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
inline double grad_check(std::span<const NamedParam> params,
                         const std::function<double()>& loss, double step) {
  if (step <= 0.0) throw std::invalid_argument("grad_check: step must be positive");
  double worst = 0.0;
  for (const NamedParam& np : params) {
    Tensor2& v = np.param->value;
    const Tensor2& g = np.param->grad;
    for (std::size_t i = 0; i < v.data.size(); ++i) {
      const double saved = v.data[i];
      v.data[i] = saved + step;
      const double up = loss();
      v.data[i] = saved - step;
      const double down = loss();
      v.data[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double analytic = g.data[i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      worst = std::max(worst, std::abs(analytic - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace nmp
