#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "tbmcg/adaptive_filter.hpp"

namespace tbmcg {

enum class AlgorithmKind { lms, nlms, rls, lmm, nmcc, robust_nlms, log_lms, cg, tbmcg };

std::string_view to_string(AlgorithmKind kind);
/// Accepts the canonical names above plus the filtered-x aliases used in
/// rosters (e.g. "rfxlms" -> robust_nlms, "fxlog" -> log_lms).
AlgorithmKind parse_algorithm_kind(std::string_view name);

/// One roster entry. Only the fields relevant to `kind` are read.
struct AlgorithmSpec {
  std::string label;
  AlgorithmKind kind = AlgorithmKind::tbmcg;

  double mu = 0.01;       // SG family step size
  double epsilon = 1e-6;  // NLMS-type regulariser
  double lambda = 0.999;  // RLS / CG forgetting factor
  double delta = 1e-2;    // RLS: P(0) = I / delta
  double eta = 0.001;     // CG step-size scale
  double ridge = 1e-2;    // CG: R(0) = ridge * I
  bool clamp_beta = true;
  double c = 20.0;        // Tukey threshold (tbmcg)
  double sigma = 1.0;     // NMCC kernel width
  double kappa = 1.0;     // log-cost scale
  std::size_t window = 9;        // LMM N_w, robust-NLMS error window (0 = filter length)
  double lambda_sigma = 0.99;    // LMM scale smoothing

  void validate() const;
};

std::unique_ptr<AdaptiveFilter> make_filter(const AlgorithmSpec& spec, std::size_t length);

}  // namespace tbmcg
