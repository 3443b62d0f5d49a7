#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <deque>
#include <span>
#include <string_view>
#include <vector>

#include "tbmcg/adaptive_filter.hpp"
#include "tbmcg/linalg.hpp"

namespace tbmcg {

/// h += mu e x
class LmsFilter final : public AdaptiveFilter {
 public:
  LmsFilter(std::size_t length, double mu);
  std::string_view kind_name() const override { return "lms"; }

 protected:
  void update(std::span<const double> x, double e, double d) override;

 private:
  double mu_;
};

/// h += mu e x / (eps + x'x)
class NlmsFilter final : public AdaptiveFilter {
 public:
  NlmsFilter(std::size_t length, double mu, double epsilon);
  std::string_view kind_name() const override { return "nlms"; }

 protected:
  void update(std::span<const double> x, double e, double d) override;

 private:
  double mu_;
  double epsilon_;
};

/// Exponentially weighted RLS, inverse-correlation form, P(0) = I / delta.
///
/// No symmetrisation or other stabilisation is applied to P.
class RlsFilter final : public AdaptiveFilter {
 public:
  RlsFilter(std::size_t length, double lambda, double delta);
  std::string_view kind_name() const override { return "rls"; }

  const SquareMatrix& inverse_correlation() const { return P_; }

 protected:
  void update(std::span<const double> x, double e, double d) override;

 private:
  double lambda_;
  double inv_lambda_;
  SquareMatrix P_;
  std::vector<double> Px_;
  std::vector<double> k_;
};

struct LmmOptions {
  double mu = 0.005;
  /// Length N_w of the squared-error window used for the robust scale.
  std::size_t window = 9;
  /// Smoothing of the scale estimate.
  double lambda_sigma = 0.99;
  /// Threshold multipliers on sigma: xi, delta1, delta2.
  std::array<double, 3> thresholds{1.96, 2.24, 2.576};

  void validate() const;
};

/// Least mean M-estimate: LMS with Hampel's three-part redescending weight.
///
/// The error scale is sigma^2 = ls sigma^2 + c1 (1 - ls) med{e^2 over N_w},
/// c1 = 1.483 (1 + 5 / (N_w - 1)); the first sample initialises it directly.
class LmmFilter final : public AdaptiveFilter {
 public:
  LmmFilter(std::size_t length, LmmOptions options);
  std::string_view kind_name() const override { return "lmm"; }

  /// Hampel weight q(e) for the current scale estimate.
  double hampel_weight(double e) const;
  double scale() const { return std::sqrt(sigma2_); }

 protected:
  void update(std::span<const double> x, double e, double d) override;

 private:
  LmmOptions options_;
  double c1_;
  double sigma2_ = 0.0;
  bool scale_initialised_ = false;
  std::deque<double> window_;
  std::vector<double> scratch_;
};

/// Normalized maximum correntropy: NLMS scaled by exp(-e^2 / (2 sigma^2)).
class NmccFilter final : public AdaptiveFilter {
 public:
  NmccFilter(std::size_t length, double mu, double sigma, double epsilon);
  std::string_view kind_name() const override { return "nmcc"; }

 protected:
  void update(std::span<const double> x, double e, double d) override;

 private:
  double mu_;
  double inv_two_sigma2_;
  double epsilon_;
};

/// NLMS whose normaliser also carries the energy of the last `error_window`
/// errors: h += mu e x / (eps + x'x + sum e_k^2). Core of RFxLMS.
class RobustNlmsFilter final : public AdaptiveFilter {
 public:
  RobustNlmsFilter(std::size_t length, double mu, double epsilon, std::size_t error_window);
  std::string_view kind_name() const override { return "robust_nlms"; }

 protected:
  void update(std::span<const double> x, double e, double d) override;

 private:
  double mu_;
  double epsilon_;
  std::size_t error_window_;
  std::deque<double> errors_;
  double error_energy_ = 0.0;
};

/// Gradient descent on the log cost kappa^2/2 ln(1 + e^2/kappa^2):
/// h += mu e x / (1 + e^2/kappa^2). Core of FxlogLMS.
class LogLmsFilter final : public AdaptiveFilter {
 public:
  LogLmsFilter(std::size_t length, double mu, double kappa);
  std::string_view kind_name() const override { return "log_lms"; }

 protected:
  void update(std::span<const double> x, double e, double d) override;

 private:
  double mu_;
  double inv_kappa2_;
};

}  // namespace tbmcg
