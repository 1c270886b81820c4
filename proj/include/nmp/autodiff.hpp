#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nmp/nn.hpp"

namespace nmp {

// Reverse-mode tape over vector-valued nodes. Forward calls append nodes in
// topological order; backward() sweeps them in reverse and accumulates
// parameter gradients into Param::grad. Forward-only use never writes to the
// referenced parameters, so evaluation with shared parameters is thread-safe;
// backward() mutates Param::grad and must be externally serialized.
class Tape {
 public:
  using Id = std::size_t;

  // Constant leaf; receives no gradient.
  Id input(Vec v) { return push(std::move(v), nullptr); }

  Id zeros(std::size_t n) { return input(Vec(n, 0.0)); }

  // One row of a parameter table (embedding lookup).
  Id table_row(Param& table, std::size_t row) {
    if (row >= table.value.rows)
      throw std::out_of_range("table_row: row index out of range");
    const std::size_t d = table.value.cols;
    Vec v(table.value.data.begin() + row * d,
          table.value.data.begin() + (row + 1) * d);
    Param* t = &table;
    return push(std::move(v), [t, row, d](Tape&, const Node& self) {
      for (std::size_t i = 0; i < d; ++i)
        t->grad.data[row * d + i] += self.grad[i];
    });
  }

  // W x + b, with b a column vector.
  Id affine(Param& w, Param& b, Id x) {
    const Vec& xv = value(x);
    if (xv.size() != w.value.cols || b.value.rows != w.value.rows || b.value.cols != 1)
      throw std::invalid_argument("affine: dimension mismatch");
    Vec y = matvec(w.value, xv);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += b.value.data[i];
    Param* wp = &w;
    Param* bp = &b;
    return push(std::move(y), [wp, bp, x](Tape& t, const Node& self) {
      const Vec& xval = t.value(x);
      const std::size_t rows = wp->value.rows, cols = wp->value.cols;
      for (std::size_t r = 0; r < rows; ++r) {
        const double g = self.grad[r];
        if (g == 0.0) continue;
        double* wg = wp->grad.data.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) wg[c] += g * xval[c];
        bp->grad.data[r] += g;
      }
      Vec dx = matvec_transpose(wp->value, self.grad);
      t.add_grad(x, dx);
    });
  }

  Id elu_op(Id x) {
    const Vec& xv = value(x);
    Vec y(xv.size());
    for (std::size_t i = 0; i < xv.size(); ++i) {
      y[i] = elu(xv[i]);
      min_abs_elu_input_ = std::min(min_abs_elu_input_, std::abs(xv[i]));
    }
    return push(std::move(y), [x](Tape& t, const Node& self) {
      const Vec& xval = t.value(x);
      Vec dx(xval.size());
      for (std::size_t i = 0; i < xval.size(); ++i)
        dx[i] = self.grad[i] * elu_deriv(xval[i]);
      t.add_grad(x, dx);
    });
  }

  Id concat(Id a, Id b) {
    Vec v = value(a);
    const Vec& vb = value(b);
    v.insert(v.end(), vb.begin(), vb.end());
    return push(std::move(v), [a, b](Tape& t, const Node& self) {
      const std::size_t na = t.value(a).size();
      Vec da(self.grad.begin(), self.grad.begin() + na);
      Vec db(self.grad.begin() + na, self.grad.end());
      t.add_grad(a, da);
      t.add_grad(b, db);
    });
  }

  // Mean of the given nodes, all of length dim; an empty list yields a zero
  // vector (the empty-neighborhood convention for Eq. 4).
  Id mean_of(std::vector<Id> xs, std::size_t dim) {
    if (xs.empty()) return zeros(dim);
    Vec v(dim, 0.0);
    for (Id x : xs) {
      const Vec& xv = value(x);
      if (xv.size() != dim) throw std::invalid_argument("mean_of: dimension mismatch");
      for (std::size_t i = 0; i < dim; ++i) v[i] += xv[i];
    }
    const double inv = 1.0 / static_cast<double>(xs.size());
    for (double& e : v) e *= inv;
    return push(std::move(v), [xs = std::move(xs), inv](Tape& t, const Node& self) {
      Vec dx(self.grad.size());
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] = self.grad[i] * inv;
      for (Id x : xs) t.add_grad(x, dx);
    });
  }

  Id softmax_op(Id z) {
    Vec p = softmax(value(z));
    return push(std::move(p), [z](Tape& t, const Node& self) {
      const Vec& p = self.value;
      double dot = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) dot += self.grad[i] * p[i];
      Vec dz(p.size());
      for (std::size_t i = 0; i < p.size(); ++i) dz[i] = p[i] * (self.grad[i] - dot);
      t.add_grad(z, dz);
    });
  }

  // -ln(probs[target] + 1e-12), a scalar node.
  Id cross_entropy_op(Id probs, std::size_t target) {
    const Vec& p = value(probs);
    Vec v{cross_entropy(p, target)};
    return push(std::move(v), [probs, target](Tape& t, const Node& self) {
      const Vec& p = t.value(probs);
      Vec dp(p.size(), 0.0);
      dp[target] = -self.grad[0] / (p[target] + kProbFloor);
      t.add_grad(probs, dp);
    });
  }

  // Mean of scalar nodes.
  Id mean_scalars(std::vector<Id> xs) {
    if (xs.empty()) throw std::invalid_argument("mean_scalars: empty input");
    double sum = 0.0;
    for (Id x : xs) {
      if (value(x).size() != 1) throw std::invalid_argument("mean_scalars: non-scalar input");
      sum += value(x)[0];
    }
    const double inv = 1.0 / static_cast<double>(xs.size());
    return push(Vec{sum * inv}, [xs = std::move(xs), inv](Tape& t, const Node& self) {
      const Vec d{self.grad[0] * inv};
      for (Id x : xs) t.add_grad(x, d);
    });
  }

  const Vec& value(Id id) const { return nodes_.at(id).value; }

  std::size_t size() const { return nodes_.size(); }

  // Smallest |x| ever fed to an ELU on this tape. Gradient-check callers use
  // it to reject forward passes that land on the kink, where central
  // differences are invalid.
  double min_abs_elu_input() const { return min_abs_elu_input_; }

  // Reverse sweep from a scalar node; gradients accumulate into every Param
  // touched by the recorded ops.
  void backward(Id loss) {
    if (loss >= nodes_.size())
      throw std::logic_error("backward: no forward pass recorded for this id");
    if (nodes_[loss].value.size() != 1)
      throw std::invalid_argument("backward: loss must be scalar");
    for (Node& n : nodes_) n.grad.assign(n.value.size(), 0.0);
    nodes_[loss].grad[0] = 1.0;
    for (std::size_t i = loss + 1; i-- > 0;) {
      const Node& n = nodes_[i];
      if (n.pull) n.pull(*this, n);
    }
  }

 private:
  struct Node {
    Vec value;
    Vec grad;
    std::function<void(Tape&, const Node&)> pull;
  };

  Id push(Vec value, std::function<void(Tape&, const Node&)> pull) {
    nodes_.push_back(Node{std::move(value), {}, std::move(pull)});
    return nodes_.size() - 1;
  }

  void add_grad(Id id, const Vec& g) {
    Vec& dst = nodes_[id].grad;
    for (std::size_t i = 0; i < g.size(); ++i) dst[i] += g[i];
  }

  std::vector<Node> nodes_;
  double min_abs_elu_input_ = std::numeric_limits<double>::infinity();
};

// Tape forward through a two-layer MLP.
inline Tape::Id mlp2_tape(Tape& t, Mlp2& m, Tape::Id x) {
  return t.affine(m.w2, m.b2, t.elu_op(t.affine(m.w1, m.b1, x)));
}

}  // namespace nmp
