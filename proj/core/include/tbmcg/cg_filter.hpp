#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tbmcg/adaptive_filter.hpp"
#include "tbmcg/estimators.hpp"
#include "tbmcg/linalg.hpp"

namespace tbmcg {

struct CgOptions {
  /// Forgetting factor of the correlation estimates, in (0, 1).
  double lambda = 0.999;
  /// Step-size scale, > 0.
  double eta = 0.001;
  /// R starts at ridge * I.
  double ridge = 1e-2;
  /// Step size is zeroed when |p'Rp| falls below this.
  double denominator_floor = 1e-12;
  /// Direction restarts (beta = 0) when g'g falls below this.
  double residual_floor = 1e-12;
  /// Clamp negative Polak-Ribiere coefficients to zero (PR+).
  bool clamp_beta = true;

  void validate() const;
};

/// Online conjugate-gradient adaptive filter, one CG iteration per sample.
///
/// With a TukeyEstimator attached each sample is weighted by the biweight
/// factor psi(e) in [0, 1] before it enters the exponentially weighted
/// correlation R, the cross-correlation theta and the residual g; samples
/// with |e| > c leave only the lambda decay behind. Without an estimator
/// psi is identically 1 and the filter is the standard CG algorithm; both
/// run through the same code, so a c = +inf estimator produces bit-identical
/// states to the detached case.
///
/// Per sample, with h, g, p from the previous sample:
///   e     = d - h'x
///   R     = lambda R + psi x x'          theta = lambda theta + psi d x
///   delta = eta (p'g) / (p'R p)
///   g_new = lambda g - delta R p + psi e x
///   beta  = (g_new - g)'g_new / (g'g)
///   p_new = g_new + beta p
///   h     = h + delta p_new
///
/// The rank-one update uses z = sqrt(psi) x so that z z' is exactly
/// symmetric, and psi x = sqrt(psi) z feeds theta and g.
class CgFilter final : public AdaptiveFilter {
 public:
  CgFilter(std::size_t length, CgOptions options,
           std::optional<TukeyEstimator> estimator = std::nullopt);

  std::string_view kind_name() const override { return estimator_ ? "tbmcg" : "cg"; }

  const CgOptions& options() const { return options_; }
  const std::optional<TukeyEstimator>& estimator() const { return estimator_; }
  /// Replace the estimator threshold mid-run (piecewise schedules).
  void set_threshold(double c);

  const SquareMatrix& correlation() const { return R_; }
  std::span<const double> cross_correlation() const { return theta_; }
  std::span<const double> residual() const { return g_; }
  std::span<const double> direction() const { return p_; }

  double last_weight() const { return last_psi_; }
  double last_step_size() const { return last_delta_; }
  double last_beta() const { return last_beta_; }
  std::uint64_t iteration() const { return iteration_; }

  /// (h_o - h)' R (h_o - h), the R-weighted squared weight error.
  double weight_error_diagnostic(std::span<const double> h_o) const;

 protected:
  void update(std::span<const double> x, double e, double d) override;

 private:
  CgOptions options_;
  std::optional<TukeyEstimator> estimator_;
  SquareMatrix R_;
  std::vector<double> theta_;
  std::vector<double> g_;
  std::vector<double> p_;

  // scratch
  std::vector<double> z_;
  std::vector<double> w_;
  std::vector<double> Rp_;
  std::vector<double> g_new_;

  double last_psi_ = 1.0;
  double last_delta_ = 0.0;
  double last_beta_ = 0.0;
  std::uint64_t iteration_ = 0;
};

}  // namespace tbmcg
