#include "tbmcg/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tbmcg/errors.hpp"

namespace tbmcg {

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(std::string(what) + " must be positive and finite, got " + std::to_string(v));
  }
}

void require_non_negative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw ConfigError(std::string(what) + " must be non-negative, got " + std::to_string(v));
  }
}

void require_unit_interval(double v, const char* what) {
  if (!(v > 0.0 && v < 1.0)) {
    throw ConfigError(std::string(what) + " must lie in (0, 1), got " + std::to_string(v));
  }
}

}  // namespace

// LMS ------------------------------------------------------------------------

LmsFilter::LmsFilter(std::size_t length, double mu) : AdaptiveFilter(length), mu_(mu) {
  require_non_negative(mu, "lms: mu");
}

void LmsFilter::update(std::span<const double> x, double e, double) {
  const std::size_t n = length();
  const double k = mu_ * e;
  for (std::size_t i = 0; i < n; ++i) {
    h_[i] += k * x[i];
  }
  ops_.mults += n + 1;
  ops_.adds += n;
}

// NLMS -----------------------------------------------------------------------

NlmsFilter::NlmsFilter(std::size_t length, double mu, double epsilon)
    : AdaptiveFilter(length), mu_(mu), epsilon_(epsilon) {
  require_non_negative(mu, "nlms: mu");
  require_non_negative(epsilon, "nlms: epsilon");
}

void NlmsFilter::update(std::span<const double> x, double e, double) {
  const std::size_t n = length();
  const double energy = epsilon_ + squared_norm(x);
  if (energy <= 0.0) {
    return;
  }
  const double k = mu_ * e / energy;
  for (std::size_t i = 0; i < n; ++i) {
    h_[i] += k * x[i];
  }
  ops_.mults += 2 * n + 2;
  ops_.adds += 2 * n;
}

// RLS ------------------------------------------------------------------------

RlsFilter::RlsFilter(std::size_t length, double lambda, double delta)
    : AdaptiveFilter(length),
      lambda_(lambda),
      inv_lambda_(1.0 / lambda),
      P_(length, 1.0 / delta),
      Px_(length, 0.0),
      k_(length, 0.0) {
  require_unit_interval(lambda, "rls: lambda");
  require_positive(delta, "rls: delta");
}

void RlsFilter::update(std::span<const double> x, double e, double) {
  const std::size_t n = length();
  for (std::size_t i = 0; i < n; ++i) {
    Px_[i] = dot(P_.row(i), x);
  }
  const double denom = lambda_ + dot(x, Px_);
  const double inv_denom = 1.0 / denom;
  for (std::size_t i = 0; i < n; ++i) {
    k_[i] = Px_[i] * inv_denom;
    h_[i] += k_[i] * e;
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto row = P_.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      row[j] = (row[j] - k_[i] * Px_[j]) * inv_lambda_;
    }
  }
  ops_.mults += 3 * n * n + 3 * n + 1;
  ops_.adds += 2 * n * n + n;
}

// LMM ------------------------------------------------------------------------

void LmmOptions::validate() const {
  require_non_negative(mu, "lmm: mu");
  if (window == 0) {
    throw ConfigError("lmm: window N_w must be at least 1");
  }
  require_unit_interval(lambda_sigma, "lmm: lambda_sigma");
  if (!(thresholds[0] > 0.0 && thresholds[0] < thresholds[1] && thresholds[1] < thresholds[2])) {
    throw ConfigError("lmm: thresholds must be positive and strictly increasing");
  }
}

LmmFilter::LmmFilter(std::size_t length, LmmOptions options)
    : AdaptiveFilter(length), options_(options) {
  options_.validate();
  const auto nw = static_cast<double>(options_.window);
  c1_ = options_.window > 1 ? 1.483 * (1.0 + 5.0 / (nw - 1.0)) : 1.483;
  scratch_.reserve(options_.window);
}

double LmmFilter::hampel_weight(double e) const {
  const double sigma = std::sqrt(sigma2_);
  const double a = std::fabs(e);
  const double xi = options_.thresholds[0] * sigma;
  const double d1 = options_.thresholds[1] * sigma;
  const double d2 = options_.thresholds[2] * sigma;
  if (a < xi) {
    return 1.0;
  }
  if (a < d1) {
    return xi / a;
  }
  if (a < d2) {
    return (xi / a) * (d2 - a) / (d2 - d1);
  }
  return 0.0;
}

void LmmFilter::update(std::span<const double> x, double e, double) {
  const std::size_t n = length();
  window_.push_back(e * e);
  if (window_.size() > options_.window) {
    window_.pop_front();
  }
  scratch_.assign(window_.begin(), window_.end());
  auto mid = scratch_.begin() + static_cast<std::ptrdiff_t>(scratch_.size() / 2);
  std::nth_element(scratch_.begin(), mid, scratch_.end());
  const double med = *mid;
  if (!scale_initialised_) {
    sigma2_ = c1_ * med;
    scale_initialised_ = true;
  } else {
    sigma2_ = options_.lambda_sigma * sigma2_ + c1_ * (1.0 - options_.lambda_sigma) * med;
  }
  const double q = hampel_weight(e);
  const double k = options_.mu * q * e;
  for (std::size_t i = 0; i < n; ++i) {
    h_[i] += k * x[i];
  }
  ops_.mults += n + options_.window + 7;
  ops_.adds += n + 2;
  ops_.comparisons += 3;
}

// NMCC -----------------------------------------------------------------------

NmccFilter::NmccFilter(std::size_t length, double mu, double sigma, double epsilon)
    : AdaptiveFilter(length), mu_(mu), inv_two_sigma2_(0.5 / (sigma * sigma)), epsilon_(epsilon) {
  require_non_negative(mu, "nmcc: mu");
  require_positive(sigma, "nmcc: sigma");
  require_non_negative(epsilon, "nmcc: epsilon");
}

void NmccFilter::update(std::span<const double> x, double e, double) {
  const std::size_t n = length();
  const double energy = epsilon_ + squared_norm(x);
  if (energy <= 0.0) {
    return;
  }
  const double kernel = std::exp(-e * e * inv_two_sigma2_);
  const double k = mu_ * kernel * e / energy;
  for (std::size_t i = 0; i < n; ++i) {
    h_[i] += k * x[i];
  }
  ops_.mults += 2 * n + 5;
  ops_.adds += 2 * n;
  ops_.specials += 1;
}

// Robust-normalized LMS ---------------------------------------------------------

RobustNlmsFilter::RobustNlmsFilter(std::size_t length, double mu, double epsilon,
                                   std::size_t error_window)
    : AdaptiveFilter(length), mu_(mu), epsilon_(epsilon), error_window_(error_window) {
  require_non_negative(mu, "robust nlms: mu");
  require_positive(epsilon, "robust nlms: epsilon");
  if (error_window == 0) {
    throw ConfigError("robust nlms: error window must be at least 1");
  }
}

void RobustNlmsFilter::update(std::span<const double> x, double e, double) {
  const std::size_t n = length();
  errors_.push_back(e);
  if (errors_.size() > error_window_) {
    errors_.pop_front();
  }
  error_energy_ = 0.0;
  for (double v : errors_) {
    error_energy_ += v * v;
  }
  const double k = mu_ * e / (epsilon_ + squared_norm(x) + error_energy_);
  for (std::size_t i = 0; i < n; ++i) {
    h_[i] += k * x[i];
  }
  ops_.mults += 2 * n + 4;
  ops_.adds += 2 * n + 4;
}

// Log-cost LMS -------------------------------------------------------------------

LogLmsFilter::LogLmsFilter(std::size_t length, double mu, double kappa)
    : AdaptiveFilter(length), mu_(mu), inv_kappa2_(1.0 / (kappa * kappa)) {
  require_non_negative(mu, "log lms: mu");
  require_positive(kappa, "log lms: kappa");
}

void LogLmsFilter::update(std::span<const double> x, double e, double) {
  const std::size_t n = length();
  const double k = mu_ * e / (1.0 + e * e * inv_kappa2_);
  for (std::size_t i = 0; i < n; ++i) {
    h_[i] += k * x[i];
  }
  ops_.mults += n + 4;
  ops_.adds += n + 1;
}

}  // namespace tbmcg
