#include "tbmcg/algorithm.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "tbmcg/baselines.hpp"
#include "tbmcg/cg_filter.hpp"
#include "tbmcg/errors.hpp"

namespace tbmcg {

std::string_view to_string(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::lms: return "lms";
    case AlgorithmKind::nlms: return "nlms";
    case AlgorithmKind::rls: return "rls";
    case AlgorithmKind::lmm: return "lmm";
    case AlgorithmKind::nmcc: return "nmcc";
    case AlgorithmKind::robust_nlms: return "robust_nlms";
    case AlgorithmKind::log_lms: return "log_lms";
    case AlgorithmKind::cg: return "cg";
    case AlgorithmKind::tbmcg: return "tbmcg";
  }
  return "unknown";
}

AlgorithmKind parse_algorithm_kind(std::string_view name) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (key == "lms" || key == "fxlms") return AlgorithmKind::lms;
  if (key == "nlms" || key == "fxnlms") return AlgorithmKind::nlms;
  if (key == "rls" || key == "fxrls") return AlgorithmKind::rls;
  if (key == "lmm") return AlgorithmKind::lmm;
  if (key == "nmcc") return AlgorithmKind::nmcc;
  if (key == "robust_nlms" || key == "rfxlms") return AlgorithmKind::robust_nlms;
  if (key == "log_lms" || key == "fxloglms" || key == "fxlog") return AlgorithmKind::log_lms;
  if (key == "cg" || key == "fxcg") return AlgorithmKind::cg;
  if (key == "tbmcg" || key == "fxtbmcg") return AlgorithmKind::tbmcg;
  throw ConfigError("unknown algorithm kind '" + std::string(name) + "'");
}

void AlgorithmSpec::validate() const {
  // Constructing a throwaway filter runs every per-kind check in one place.
  (void)make_filter(*this, 1);
}

std::unique_ptr<AdaptiveFilter> make_filter(const AlgorithmSpec& spec, std::size_t length) {
  switch (spec.kind) {
    case AlgorithmKind::lms:
      return std::make_unique<LmsFilter>(length, spec.mu);
    case AlgorithmKind::nlms:
      return std::make_unique<NlmsFilter>(length, spec.mu, spec.epsilon);
    case AlgorithmKind::rls:
      return std::make_unique<RlsFilter>(length, spec.lambda, spec.delta);
    case AlgorithmKind::lmm: {
      LmmOptions o;
      o.mu = spec.mu;
      o.window = spec.window;
      o.lambda_sigma = spec.lambda_sigma;
      return std::make_unique<LmmFilter>(length, o);
    }
    case AlgorithmKind::nmcc:
      return std::make_unique<NmccFilter>(length, spec.mu, spec.sigma, spec.epsilon);
    case AlgorithmKind::robust_nlms:
      return std::make_unique<RobustNlmsFilter>(length, spec.mu, spec.epsilon,
                                                spec.window == 0 ? length : spec.window);
    case AlgorithmKind::log_lms:
      return std::make_unique<LogLmsFilter>(length, spec.mu, spec.kappa);
    case AlgorithmKind::cg:
    case AlgorithmKind::tbmcg: {
      CgOptions o;
      o.lambda = spec.lambda;
      o.eta = spec.eta;
      o.ridge = spec.ridge;
      o.clamp_beta = spec.clamp_beta;
      std::optional<TukeyEstimator> est;
      if (spec.kind == AlgorithmKind::tbmcg) {
        est.emplace(spec.c);
      }
      return std::make_unique<CgFilter>(length, o, est);
    }
  }
  throw ConfigError("unhandled algorithm kind");
}

}  // namespace tbmcg
