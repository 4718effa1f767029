#include "epr/autodiff.hpp"

#include <cmath>

namespace epr {

Tape::Index Tape::exp_(Index a) {
  const double e = std::exp(vals_[a]);
  return push(e, a, -1, e, 0.0);
}

Tape::Index Tape::log_(Index a) {
  return push(std::log(vals_[a]), a, -1, 1.0 / vals_[a], 0.0);
}

Tape::Index Tape::sigmoid(Index a) {
  const double t = vals_[a];
  double s;
  if (t >= 0) {
    s = 1.0 / (1.0 + std::exp(-t));
  } else {
    const double e = std::exp(t);
    s = e / (1.0 + e);
  }
  return push(s, a, -1, s * (1.0 - s), 0.0);
}

void Tape::backward(Index output) {
  adj_.assign(vals_.size(), 0.0);
  adj_[output] = 1.0;
  for (Index i = static_cast<Index>(nodes_.size()) - 1; i >= 0; --i) {
    const double g = adj_[i];
    if (g == 0.0) continue;
    const Node& n = nodes_[i];
    if (n.a >= 0) adj_[n.a] += g * n.da;
    if (n.b >= 0) adj_[n.b] += g * n.db;
  }
}

}  // namespace epr
