#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace epr {

/// Minimal scalar reverse-mode tape. Records binary/unary ops with local
/// partials; backward() accumulates adjoints in one reverse sweep. Buffers
/// are reused across reset() calls so hot loops stay allocation-free.
class Tape {
 public:
  using Index = std::int32_t;

  void reset() {
    vals_.clear();
    nodes_.clear();
  }
  int size() const { return static_cast<int>(vals_.size()); }
  double value(Index i) const { return vals_[i]; }

  Index constant(double v) { return push(v, -1, -1, 0.0, 0.0); }
  Index add(Index a, Index b) { return push(vals_[a] + vals_[b], a, b, 1, 1); }
  Index sub(Index a, Index b) { return push(vals_[a] - vals_[b], a, b, 1, -1); }
  Index mul(Index a, Index b) {
    return push(vals_[a] * vals_[b], a, b, vals_[b], vals_[a]);
  }
  Index div(Index a, Index b) {
    const double inv = 1.0 / vals_[b];
    return push(vals_[a] * inv, a, b, inv, -vals_[a] * inv * inv);
  }
  Index neg(Index a) { return push(-vals_[a], a, -1, -1.0, 0.0); }
  Index scale(Index a, double c) { return push(c * vals_[a], a, -1, c, 0.0); }
  Index add_const(Index a, double c) {
    return push(vals_[a] + c, a, -1, 1.0, 0.0);
  }
  Index exp_(Index a);
  Index log_(Index a);
  /// Overflow-safe logistic sigmoid.
  Index sigmoid(Index a);

  /// Seeds d(output)/d(output) = 1 and sweeps; then adjoint(i) holds
  /// d(output)/d(node i).
  void backward(Index output);
  double adjoint(Index i) const { return adj_[i]; }

 private:
  struct Node {
    Index a, b;
    double da, db;
  };
  Index push(double v, Index a, Index b, double da, double db) {
    vals_.push_back(v);
    nodes_.push_back({a, b, da, db});
    return static_cast<Index>(vals_.size() - 1);
  }
  std::vector<double> vals_;
  std::vector<Node> nodes_;
  std::vector<double> adj_;
};

}  // namespace epr
