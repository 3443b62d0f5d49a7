#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tbmcg/adaptive_filter.hpp"
#include "tbmcg/algorithm.hpp"
#include "tbmcg/metrics_io.hpp"
#include "tbmcg/noise.hpp"

namespace tbmcg {

/// Primary path P (reference -> error sensor), secondary path S
/// (actuator -> error sensor) and the controller's model of S.
struct AncPlant {
  std::vector<double> primary_path;
  std::vector<double> secondary_path;
  std::vector<double> secondary_estimate;

  void validate() const;
};

/// Path file: first non-comment line is the tap count, then one
/// coefficient per line. Lines starting with '#' are ignored.
std::vector<double> load_path(const std::filesystem::path& path);
void save_path(std::span<const double> coefficients, const std::filesystem::path& path,
               std::string_view comment = {});

/// Copy of `secondary` with every tap scaled by (1 + mismatch * u),
/// u uniform on [-1, 1].
std::vector<double> perturb_path(std::span<const double> secondary, double mismatch, Rng& rng);

/// Tap-delay line holding [x(n), x(n-1), ..., x(n-L+1)] contiguously.
class DelayLine {
 public:
  explicit DelayLine(std::size_t length);

  void push(double sample);
  std::span<const double> view() const { return {buffer_.data() + head_, length_}; }
  std::size_t length() const { return length_; }

 private:
  std::size_t length_;
  std::size_t head_;
  std::vector<double> buffer_;
};

/// Fixed FIR filter with its own delay line.
class FirFilter {
 public:
  explicit FirFilter(std::vector<double> taps);

  double push(double sample);
  std::span<const double> taps() const { return taps_; }

 private:
  std::vector<double> taps_;
  DelayLine line_;
};

/// Averaged noise reduction: exponentially smoothed |e| over smoothed |d|.
struct AnrState {
  double rho = 0.999;
  double a_e = 0.0;
  double a_d = 0.0;

  explicit AnrState(double smoothing = 0.999);

  /// Updates the accumulators and returns 20 log10(a_e / a_d) in dB,
  /// clamped to [-300, 300]; 0 dB while both are still zero.
  double update(double e, double d);
};

/// One single-channel feedforward ANC loop around an adaptive controller.
///
///   d(n)  = P * x(n)
///   y(n)  = h' [x(n) ... x(n-L+1)]
///   e(n)  = d(n) - S * y(n) + v(n)
///   x'(n) = S_hat * x(n)
///   controller.adapt([x'(n) ... x'(n-L+1)], e(n))
class AncLoop {
 public:
  AncLoop(std::unique_ptr<AdaptiveFilter> controller, const AncPlant& plant);

  /// Advances one sample; returns the residual e(n).
  double step(double reference, double sensor_noise = 0.0);

  double last_disturbance() const { return last_d_; }
  AdaptiveFilter& controller() { return *controller_; }
  const AdaptiveFilter& controller() const { return *controller_; }

 private:
  std::unique_ptr<AdaptiveFilter> controller_;
  FirFilter primary_;
  FirFilter secondary_;
  FirFilter estimate_;
  DelayLine reference_;
  DelayLine filtered_;
  double last_d_ = 0.0;
};

struct AncConfig {
  std::string name = "anc";
  std::uint64_t seed = 1;
  std::size_t runs = 10;
  std::size_t iterations = 6000;
  std::size_t filter_length = 128;
  AncPlant plant;
  /// Relative perturbation of the secondary-path model, 0 = exact.
  double estimate_mismatch = 0.0;
  /// Reference noise source; segment thresholds override TbMCG's c.
  Schedule reference;
  /// Additive noise at the error sensor.
  std::optional<NoiseSpec> sensor_noise;
  double anr_rho = 0.999;
  std::vector<AlgorithmSpec> algorithms;
  std::size_t jobs = 0;

  void validate() const;
};

struct AncRunResult {
  std::vector<double> anr_trace;
  bool diverged = false;
  /// First iteration at which the controller was flagged.
  std::optional<std::size_t> divergence_iteration;
};

struct AncResult {
  std::vector<LearningCurve> curves;
  /// divergence[algorithm][run]
  std::vector<std::vector<std::optional<std::size_t>>> divergence;
};

/// One algorithm over one run. Reference and sensor noise are common to
/// every algorithm of the run.
AncRunResult run_anc_algorithm(const AncConfig& config, const AlgorithmSpec& spec,
                               std::span<const double> reference,
                               std::span<const double> sensor_noise);

std::vector<AncRunResult> run_anc_single(const AncConfig& config, std::size_t run);

/// ANR learning curve per algorithm, averaged in dB over finite runs.
AncResult run_anc_experiment(const AncConfig& config);

/// Synthetic default paths: a 32-tap band-pass primary path behind an
/// 8-sample delay (40 coefficients) and a 14-tap band-pass secondary path
/// behind a 2-sample delay (16 coefficients).
AncPlant default_anc_plant();

}  // namespace tbmcg
