#include "tbmcg/estimators.hpp"

#include <cmath>
#include <string>

#include "tbmcg/errors.hpp"

namespace tbmcg {

namespace {

void require_finite(double e) {
  if (!std::isfinite(e)) {
    throw InputError("tukey estimator: non-finite error value");
  }
}

}  // namespace

TukeyEstimator::TukeyEstimator(double c) : c_(c), inv_c_(1.0 / c) {
  if (std::isnan(c) || !(c > 0.0)) {
    throw ConfigError("tukey estimator: threshold c must be positive, got " + std::to_string(c));
  }
}

bool TukeyEstimator::accepts(double e) const { return std::fabs(e) <= c_; }

double TukeyEstimator::objective(double e) const {
  require_finite(e);
  if (!accepts(e)) {
    return 1.0 / 3.0;
  }
  const double u = e * inv_c_;
  const double u2 = u * u;
  // u2 - u2^2 + u2^3/3, Horner form.
  return u2 * (1.0 + u2 * (-1.0 + u2 / 3.0));
}

double TukeyEstimator::score(double e) const {
  require_finite(e);
  if (!accepts(e)) {
    return 0.0;
  }
  const double u = e * inv_c_;
  const double s = 1.0 - u * u;
  return e * (s * s);
}

double TukeyEstimator::weight(double e) const {
  require_finite(e);
  if (!accepts(e)) {
    return 0.0;
  }
  const double u = e * inv_c_;
  const double s = 1.0 - u * u;
  return s * s;
}

}  // namespace tbmcg
