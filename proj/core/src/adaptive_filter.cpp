#include "tbmcg/adaptive_filter.hpp"

#include <cmath>
#include <string>

#include "tbmcg/errors.hpp"
#include "tbmcg/linalg.hpp"

namespace tbmcg {

AdaptiveFilter::AdaptiveFilter(std::size_t length) : h_(length, 0.0) {
  if (length == 0) {
    throw ConfigError("adaptive filter: length must be at least 1");
  }
}

void AdaptiveFilter::validate(std::span<const double> x, double scalar) const {
  if (x.size() != h_.size()) {
    throw InputError("adaptive filter: input vector has length " + std::to_string(x.size()) +
                     ", filter length is " + std::to_string(h_.size()));
  }
  if (!std::isfinite(scalar)) {
    throw InputError("adaptive filter: non-finite scalar sample");
  }
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw InputError("adaptive filter: non-finite input sample");
    }
  }
}

double AdaptiveFilter::output(std::span<const double> x) const { return dot(h_, x); }

StepResult AdaptiveFilter::step(std::span<const double> x, double d) {
  validate(x, d);
  ops_.reset();
  const double y = output(x);
  const std::uint64_t n = h_.size();
  ops_.mults += n;
  ops_.adds += n - 1;
  const double e = d - y;
  ops_.adds += 1;
  if (!diverged_) {
    update(x, e, d);
    check_divergence();
  }
  return {y, e};
}

void AdaptiveFilter::adapt(std::span<const double> x, double e) {
  validate(x, e);
  ops_.reset();
  if (diverged_) {
    return;
  }
  // Equivalent desired sample under the filtered-x approximation.
  const double d = e + output(x);
  update(x, e, d);
  check_divergence();
}

void AdaptiveFilter::check_divergence() {
  double norm2 = 0.0;
  for (double w : h_) {
    if (!std::isfinite(w)) {
      diverged_ = true;
      return;
    }
    norm2 += w * w;
  }
  if (!std::isfinite(norm2) || norm2 > divergence_norm_ * divergence_norm_) {
    diverged_ = true;
  }
}

}  // namespace tbmcg
