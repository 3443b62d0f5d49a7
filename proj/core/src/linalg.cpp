#include "tbmcg/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace tbmcg {

SquareMatrix::SquareMatrix(std::size_t n, double diagonal) : n_(n), data_(n * n, 0.0) {
  for (std::size_t i = 0; i < n; ++i) {
    (*this)(i, i) = diagonal;
  }
}

double SquareMatrix::asymmetry() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      worst = std::max(worst, std::fabs((*this)(i, j) - (*this)(j, i)));
    }
  }
  return worst;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    acc += a[i] * b[i];
  }
  return acc;
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

}  // namespace tbmcg
