#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "nmp/rng.hpp"
#include "nmp/tensor.hpp"

namespace nmp {

// Probability floor inside cross_entropy; avoids -ln(0).
constexpr double kProbFloor = 1e-12;

inline double elu(double x) { return x > 0.0 ? x : std::expm1(x); }

inline double elu_deriv(double x) { return x > 0.0 ? 1.0 : std::exp(x); }

// Numerically stable softmax (max subtraction).
inline Vec softmax(const Vec& z) {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : z) m = std::max(m, v);
  Vec p(z.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    p[i] = std::exp(z[i] - m);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

inline double cross_entropy(const Vec& probs, std::size_t target) {
  if (target >= probs.size())
    throw std::out_of_range("cross_entropy: target index out of range");
  return -std::log(probs[target] + kProbFloor);
}

// A trainable tensor together with its gradient accumulator.
struct Param {
  Tensor2 value;
  Tensor2 grad;

  Param() = default;
  Param(std::size_t r, std::size_t c) : value(r, c), grad(r, c) {}

  void zero_grad() { grad.fill(0.0); }
};

inline void glorot_init(Tensor2& t, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(t.rows + t.cols));
  for (double& v : t.data) v = rng.uniform(-limit, limit);
}

// Two fully-connected layers with ELU in between; the output layer is linear:
// y = W2 elu(W1 x + b1) + b2.
struct Mlp2 {
  Param w1, b1, w2, b2;

  Mlp2() = default;
  Mlp2(std::size_t in, std::size_t hidden, std::size_t out)
      : w1(hidden, in), b1(hidden, 1), w2(out, hidden), b2(out, 1) {}

  std::size_t in_dim() const { return w1.value.cols; }
  std::size_t out_dim() const { return w2.value.rows; }

  void init(Rng& rng) {
    glorot_init(w1.value, rng);
    b1.value.fill(0.0);
    glorot_init(w2.value, rng);
    b2.value.fill(0.0);
  }

  Vec forward(const Vec& x) const {
    Vec h = matvec(w1.value, x);
    for (std::size_t i = 0; i < h.size(); ++i) h[i] = elu(h[i] + b1.value.data[i]);
    Vec y = matvec(w2.value, h);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += b2.value.data[i];
    return y;
  }

  template <class F>
  void visit(const std::string& prefix, F&& f) {
    f(prefix + ".w1", w1);
    f(prefix + ".b1", b1);
    f(prefix + ".w2", w2);
    f(prefix + ".b2", b2);
  }
};

}  // namespace nmp
