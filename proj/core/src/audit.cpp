#include "tbmcg/audit.hpp"

#include <algorithm>
#include <cmath>

#include "tbmcg/errors.hpp"
#include "tbmcg/noise.hpp"

namespace tbmcg {

std::optional<ReferenceCost> reference_cost(AlgorithmKind kind, std::size_t length,
                                            std::size_t window) {
  const auto L = static_cast<std::int64_t>(length);
  const auto nw = static_cast<std::int64_t>(window);
  switch (kind) {
    case AlgorithmKind::lmm:
      return ReferenceCost{2 * L + 4, 2 * L + nw + 7, 0};
    case AlgorithmKind::rls:
      return ReferenceCost{3 * L * L, 4 * L * L + 3 * L + 1, 0};
    case AlgorithmKind::nmcc:
      return ReferenceCost{2 * L - 1, 2 * L + 2, 1};
    case AlgorithmKind::cg:
      return ReferenceCost{2 * L * L + 9 * L - 4, 3 * L * L + 10 * L + 2, 0};
    case AlgorithmKind::tbmcg:
      return ReferenceCost{2 * L * L + 9 * L - 3, 3 * L * L + 12 * L + 4, 0};
    default:
      return std::nullopt;
  }
}

OpCounter measure_step_ops(const AlgorithmSpec& spec, std::size_t length, bool outlier,
                           std::size_t warmup, std::uint64_t seed) {
  auto filter = make_filter(spec, length);
  Rng rng(seed);
  std::vector<double> x(length, 0.0);
  auto next = [&] {
    std::rotate(x.rbegin(), x.rbegin() + 1, x.rend());
    x[0] = rng.normal();
  };
  for (std::size_t i = 0; i < warmup; ++i) {
    next();
    filter->step(x, 0.1 * rng.normal());
  }
  next();
  filter->step(x, outlier ? 1e9 : 0.1 * rng.normal());
  return filter->last_ops();
}

double empirical_cf(std::span<const double> samples, double t) {
  if (samples.empty()) {
    throw InputError("empirical_cf: no samples");
  }
  double acc = 0.0;
  for (double v : samples) {
    acc += std::cos(t * v);
  }
  return acc / static_cast<double>(samples.size());
}

double kolmogorov_q(double x) {
  if (x <= 0.0) {
    return 1.0;
  }
  if (x < 0.2) {
    return 1.0;  // series converges slowly; Q is 1 to double precision here
  }
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    throw InputError("ks_two_sample: empty sample");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  // Stephens' small-sample correction.
  const double lambda = (ne + 0.12 + 0.11 / ne) * d;
  return {d, kolmogorov_q(lambda)};
}

}  // namespace tbmcg
