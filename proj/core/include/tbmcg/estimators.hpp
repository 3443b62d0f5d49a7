#pragma once

namespace tbmcg {

/// Tukey's biweight (bisquare) M-estimator with rejection threshold c.
///
/// The loss saturates at 1/3 for |e| > c, so the score and the weighting
/// factor are exactly zero there. The boundary |e| == c belongs to the
/// polynomial branch. c may be +infinity, in which case weight() is
/// identically 1 and the estimator is transparent.
class TukeyEstimator {
 public:
  explicit TukeyEstimator(double c);

  double c() const { return c_; }

  /// e^2/c^2 - e^4/c^4 + e^6/(3c^6) inside the threshold, 1/3 outside.
  double objective(double e) const;
  /// d objective / de = e * weight(e).
  double score(double e) const;
  /// [1 - (e/c)^2]^2 inside the threshold, 0 outside. Always in [0, 1].
  double weight(double e) const;

  /// True when |e| lies inside the threshold (polynomial branch).
  bool accepts(double e) const;

 private:
  double c_;
  double inv_c_;
};

}  // namespace tbmcg
