#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "tbmcg/op_counter.hpp"

namespace tbmcg {

struct StepResult {
  double y = 0.0;
  double e = 0.0;
};

/// Common surface of every transversal adaptive filter in the library.
///
/// Two driving modes share one update rule:
///  - step(x, d): system identification. The filter forms y = h'x and
///    e = d - y with the weights from the previous sample, then adapts.
///  - adapt(x, e): filtered-x control. The error is measured outside the
///    filter (after the secondary path); x is the filtered reference.
///
/// A filter whose weights become non-finite or exceed the divergence norm
/// raises diverged() and stops adapting. It never throws for that.
class AdaptiveFilter {
 public:
  explicit AdaptiveFilter(std::size_t length);
  virtual ~AdaptiveFilter() = default;

  AdaptiveFilter(const AdaptiveFilter&) = default;
  AdaptiveFilter& operator=(const AdaptiveFilter&) = default;

  std::size_t length() const { return h_.size(); }
  std::span<const double> weights() const { return h_; }

  StepResult step(std::span<const double> x, double d);
  void adapt(std::span<const double> x, double e);

  /// h'x without adapting.
  double output(std::span<const double> x) const;

  bool diverged() const { return diverged_; }
  double divergence_norm() const { return divergence_norm_; }
  void set_divergence_norm(double norm) { divergence_norm_ = norm; }

  /// Arithmetic performed by the most recent step()/adapt() call.
  const OpCounter& last_ops() const { return ops_; }

  virtual std::string_view kind_name() const = 0;

 protected:
  /// One weight update given the a-priori error e and desired sample d.
  virtual void update(std::span<const double> x, double e, double d) = 0;

  void mark_diverged() { diverged_ = true; }

  std::vector<double> h_;
  OpCounter ops_;

 private:
  void validate(std::span<const double> x, double scalar) const;
  void check_divergence();

  bool diverged_ = false;
  double divergence_norm_ = 1e6;
};

}  // namespace tbmcg
