#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace tbmcg {

/// Independent value stream. Every generator in the library draws from its
/// own Rng; there is no shared global engine.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  /// Standard normal (Box-Muller, second variate cached).
  double normal();
  /// Exp(1).
  double exponential();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Named sub-streams of one Monte Carlo run.
enum class Stream : std::uint64_t {
  plant = 1,
  input = 2,
  noise = 3,
  noise_gaussian = 4,
  sensor = 5,
  sensor_gaussian = 6,
  path_mismatch = 7,
};

/// Mixes (master seed, run index, stream id) into a well-separated seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run, Stream stream);

/// One symmetric alpha-stable draw with characteristic function
/// exp(-|scale * t|^alpha), by the Chambers-Mallows-Stuck construction.
/// alpha = 2 gives N(0, 2 scale^2); alpha = 1 gives a Cauchy(0, scale).
double sample_alpha_stable(double alpha, double scale, Rng& rng);

enum class NoiseKind { none, alpha_stable, gaussian, mixed, logistic_chaotic };

std::string_view to_string(NoiseKind kind);
NoiseKind parse_noise_kind(std::string_view name);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::alpha_stable;
  /// Characteristic exponent, 0 < alpha <= 2 (alpha_stable, mixed).
  double alpha = 2.0;
  /// SaS scale (alpha_stable, mixed), std (gaussian without snr_db),
  /// amplitude of the unit-power chaotic stream (logistic_chaotic).
  double scale = 1.0;
  /// Gaussian level relative to the clean signal power. Required for mixed.
  std::optional<double> snr_db;
  /// 1: logistic map x <- 4x(1-x); 3: cubic Chebyshev map x <- 4x^3 - 3x.
  int chaotic_variant = 1;
  double chaotic_x0 = 0.9;

  void validate() const;
};

/// Piecewise noise description, segment k active on [start_k, start_{k+1}).
struct Segment {
  std::uint64_t start = 0;
  NoiseSpec noise;
  /// Optional Tukey threshold for this segment (ANC schedules).
  std::optional<double> tukey_c;
};

struct Schedule {
  std::vector<Segment> segments;

  /// Starts strictly increasing, first at 0, every spec valid.
  void validate() const;
  std::size_t segment_index(std::uint64_t n) const;
  const Segment& active(std::uint64_t n) const { return segments[segment_index(n)]; }

  static Schedule single(NoiseSpec spec) { return Schedule{{Segment{0, spec, std::nullopt}}}; }
};

/// Raw (un-normalised) chaotic orbit starting after x0: x1, x2, ...
std::vector<double> chaotic_raw(int variant, double x0, std::size_t count);
/// Chaotic orbit mapped to zero mean, unit power under the map's invariant
/// density.
std::vector<double> logistic_chaotic(int variant, std::size_t count, double x0 = 0.9);

/// Stateful sampler over a Schedule. Draws must be requested for
/// n = 0, 1, 2, ... in order.
///
/// `signal_power` resolves snr_db into a Gaussian standard deviation.
class NoiseSource {
 public:
  NoiseSource(Schedule schedule, std::uint64_t seed, std::uint64_t gaussian_seed,
              double signal_power = 1.0);

  double next_sample(std::uint64_t n);
  std::vector<double> generate(std::size_t count);

  const Schedule& schedule() const { return schedule_; }

 private:
  double draw(const NoiseSpec& spec);

  Schedule schedule_;
  Rng rng_;
  Rng gaussian_rng_;
  double signal_power_;
  std::uint64_t expected_n_ = 0;
  std::size_t current_segment_ = 0;
  double chaotic_state_ = 0.0;
};

/// Standard deviation of the Gaussian component implied by spec and the
/// clean signal power.
double gaussian_std(const NoiseSpec& spec, double signal_power);

enum class InputKind { white_gaussian, ar1 };

struct InputModel {
  InputKind kind = InputKind::ar1;
  double pole = 0.5;

  void validate() const;
};

/// x(n) = pole x(n-1) + w(n), w unit white Gaussian, started from the
/// stationary distribution.
std::vector<double> ar1_input(double pole, std::size_t count, Rng& rng);
std::vector<double> generate_input(const InputModel& model, std::size_t count, Rng& rng);

}  // namespace tbmcg
