#include "tbmcg/cg_filter.hpp"

#include <cmath>
#include <string>

#include "tbmcg/errors.hpp"

namespace tbmcg {

void CgOptions::validate() const {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    throw ConfigError("cg: forgetting factor lambda must lie in (0, 1), got " +
                      std::to_string(lambda));
  }
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ConfigError("cg: step-size scale eta must be positive, got " + std::to_string(eta));
  }
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
    throw ConfigError("cg: ridge must be non-negative");
  }
  if (!(denominator_floor >= 0.0) || !(residual_floor >= 0.0)) {
    throw ConfigError("cg: guard thresholds must be non-negative");
  }
}

CgFilter::CgFilter(std::size_t length, CgOptions options, std::optional<TukeyEstimator> estimator)
    : AdaptiveFilter(length),
      options_(options),
      estimator_(estimator),
      R_(length, options.ridge),
      theta_(length, 0.0),
      g_(length, 0.0),
      p_(length, 0.0),
      z_(length, 0.0),
      w_(length, 0.0),
      Rp_(length, 0.0),
      g_new_(length, 0.0) {
  options_.validate();
}

void CgFilter::set_threshold(double c) {
  if (!estimator_) {
    throw ConfigError("cg: cannot set a threshold on a filter without an estimator");
  }
  estimator_ = TukeyEstimator(c);
}

void CgFilter::update(std::span<const double> x, double e, double d) {
  const std::size_t n = length();
  const double lambda = options_.lambda;
  ++iteration_;

  // Weighting. s = sqrt(psi) = 1 - (e/c)^2 on the accepted branch.
  bool rank_one = true;
  double s = 1.0;
  std::span<const double> z = x;  // sqrt(psi) x
  std::span<const double> w = x;  // psi x
  if (estimator_) {
    ops_.comparisons += 1;
    if (!estimator_->accepts(e)) {
      rank_one = false;
      last_psi_ = 0.0;
    } else {
      const double u = e / estimator_->c();
      s = 1.0 - u * u;
      ops_.mults += 2;
      ops_.adds += 1;
      for (std::size_t i = 0; i < n; ++i) {
        z_[i] = s * x[i];
      }
      for (std::size_t i = 0; i < n; ++i) {
        w_[i] = s * z_[i];
      }
      ops_.mults += 2 * n;
      z = z_;
      w = w_;
      last_psi_ = s * s;  // diagnostic only
    }
  } else {
    last_psi_ = 1.0;
  }

  // R and theta. An outlier leaves only the decay.
  if (rank_one) {
    for (std::size_t i = 0; i < n; ++i) {
      auto row = R_.row(i);
      const double zi = z[i];
      for (std::size_t j = 0; j < n; ++j) {
        row[j] = lambda * row[j] + zi * z[j];
      }
      theta_[i] = lambda * theta_[i] + d * w[i];
    }
    ops_.mults += 2 * n * n + 2 * n;
    ops_.adds += n * n + n;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      auto row = R_.row(i);
      for (std::size_t j = 0; j < n; ++j) {
        row[j] = lambda * row[j];
      }
      theta_[i] = lambda * theta_[i];
    }
    ops_.mults += n * n + n;
  }

  // Step size from the previous direction and residual.
  for (std::size_t i = 0; i < n; ++i) {
    Rp_[i] = dot(R_.row(i), p_);
  }
  ops_.mults += n * n;
  ops_.adds += n * (n - 1);
  const double pRp = dot(p_, Rp_);
  const double pg = dot(p_, g_);
  ops_.mults += 2 * n;
  ops_.adds += 2 * (n - 1);
  double delta = 0.0;
  if (std::fabs(pRp) >= options_.denominator_floor && pRp != 0.0) {
    delta = options_.eta * pg / pRp;
    ops_.mults += 2;
  }

  // Residual recursion.
  if (rank_one) {
    for (std::size_t i = 0; i < n; ++i) {
      g_new_[i] = lambda * g_[i] - delta * Rp_[i] + e * w[i];
    }
    ops_.mults += 3 * n;
    ops_.adds += 2 * n;
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      g_new_[i] = lambda * g_[i] - delta * Rp_[i];
    }
    ops_.mults += 2 * n;
    ops_.adds += n;
  }

  // Polak-Ribiere coefficient.
  const double gg = dot(g_, g_);
  double num = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (g_new_[i] - g_[i]) * g_new_[i];
  }
  ops_.mults += 2 * n;
  ops_.adds += (n - 1) + n + (n - 1);
  double beta = 0.0;
  if (gg >= options_.residual_floor && gg != 0.0) {
    beta = num / gg;
    ops_.mults += 1;
    if (options_.clamp_beta && beta < 0.0) {
      beta = 0.0;
    }
  }

  // New direction, then the weights move along it.
  for (std::size_t i = 0; i < n; ++i) {
    p_[i] = g_new_[i] + beta * p_[i];
    h_[i] += delta * p_[i];
  }
  ops_.mults += 2 * n;
  ops_.adds += 2 * n;
  g_.swap(g_new_);

  last_delta_ = delta;
  last_beta_ = beta;

  if (!std::isfinite(delta) || !std::isfinite(beta) || !std::isfinite(gg)) {
    mark_diverged();
  }
}

double CgFilter::weight_error_diagnostic(std::span<const double> h_o) const {
  const std::size_t n = length();
  if (h_o.size() != n) {
    throw InputError("cg: reference weight vector has length " + std::to_string(h_o.size()) +
                     ", filter length is " + std::to_string(n));
  }
  std::vector<double> err(n);
  for (std::size_t i = 0; i < n; ++i) {
    err[i] = h_o[i] - h_[i];
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += err[i] * dot(R_.row(i), err);
  }
  return acc;
}

}  // namespace tbmcg
