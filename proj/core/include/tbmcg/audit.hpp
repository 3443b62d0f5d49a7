#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tbmcg/algorithm.hpp"
#include "tbmcg/op_counter.hpp"

namespace tbmcg {

/// Published per-iteration cost of an algorithm (adds, mults, special
/// instructions). `window` is the LMM estimation window N_w.
struct ReferenceCost {
  std::int64_t adds = 0;
  std::int64_t mults = 0;
  std::int64_t specials = 0;
};

std::optional<ReferenceCost> reference_cost(AlgorithmKind kind, std::size_t length,
                                            std::size_t window);

/// Ops of one full step (filter output, error and update) measured after
/// `warmup` steps on white Gaussian data. With `outlier` the measured sample
/// carries an error far beyond any finite threshold.
OpCounter measure_step_ops(const AlgorithmSpec& spec, std::size_t length, bool outlier = false,
                           std::size_t warmup = 32, std::uint64_t seed = 7);

/// Real part of the empirical characteristic function, mean cos(t x).
double empirical_cf(std::span<const double> samples, double t);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// Kolmogorov survival function Q(x) = 2 sum (-1)^(k-1) exp(-2 k^2 x^2).
double kolmogorov_q(double x);

}  // namespace tbmcg
