#include "smcd/rng.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace smcd {

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double radius = std::sqrt(-2.0 * std::log(uniform_pos()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  if (bound == 0) throw ContractViolation("Rng::below needs a positive bound");
  // Rejection keeps the draw exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return r % bound;
}

Vector Rng::normal_vector(Index len) {
  Vector v(len);
  for (Index i = 0; i < len; ++i) v[i] = normal();
  return v;
}

Matrix Rng::normal_matrix(Index rows, Index cols) {
  // Row-major fill order so a row-prefix of a taller matrix is reproducible.
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = normal();
  return m;
}

}  // namespace smcd
