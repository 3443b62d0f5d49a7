#include "tbmcg/noise.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tbmcg/errors.hpp"

namespace tbmcg {

double Rng::uniform() {
  // (k + 0.5) / 2^53 never hits 0 or 1.
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double t = 2.0 * std::numbers::pi * uniform();
  spare_ = r * std::sin(t);
  has_spare_ = true;
  return r * std::cos(t);
}

double Rng::exponential() { return -std::log(uniform()); }

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run, Stream stream) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ run);
  return splitmix64(h ^ static_cast<std::uint64_t>(stream));
}

double sample_alpha_stable(double alpha, double scale, Rng& rng) {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw ConfigError("alpha-stable: alpha must lie in (0, 2], got " + std::to_string(alpha));
  }
  const double v = std::numbers::pi * (rng.uniform() - 0.5);
  const double w = rng.exponential();
  double x = 0.0;
  if (alpha == 1.0) {
    x = std::tan(v);
  } else {
    const double av = alpha * v;
    x = std::sin(av) / std::pow(std::cos(v), 1.0 / alpha) *
        std::pow(std::cos(v - av) / w, (1.0 - alpha) / alpha);
  }
  return scale * x;
}

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::none: return "none";
    case NoiseKind::alpha_stable: return "alpha_stable";
    case NoiseKind::gaussian: return "gaussian";
    case NoiseKind::mixed: return "mixed";
    case NoiseKind::logistic_chaotic: return "logistic_chaotic";
  }
  return "unknown";
}

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "none") return NoiseKind::none;
  if (name == "alpha_stable") return NoiseKind::alpha_stable;
  if (name == "gaussian") return NoiseKind::gaussian;
  if (name == "mixed") return NoiseKind::mixed;
  if (name == "logistic_chaotic") return NoiseKind::logistic_chaotic;
  throw ConfigError("unknown noise kind '" + std::string(name) + "'");
}

void NoiseSpec::validate() const {
  if (kind == NoiseKind::alpha_stable || kind == NoiseKind::mixed) {
    if (!(alpha > 0.0 && alpha <= 2.0)) {
      throw ConfigError("noise: alpha must lie in (0, 2], got " + std::to_string(alpha));
    }
  }
  if (kind != NoiseKind::none && !(scale > 0.0 && std::isfinite(scale))) {
    throw ConfigError("noise: scale must be positive, got " + std::to_string(scale));
  }
  if (kind == NoiseKind::mixed && !snr_db) {
    throw ConfigError("noise: mixed noise needs snr_db for its Gaussian component");
  }
  if (snr_db && !std::isfinite(*snr_db)) {
    throw ConfigError("noise: snr_db must be finite");
  }
  if (kind == NoiseKind::logistic_chaotic) {
    if (chaotic_variant != 1 && chaotic_variant != 3) {
      throw ConfigError("noise: unknown chaotic variant " + std::to_string(chaotic_variant));
    }
    const double lo = chaotic_variant == 1 ? 0.0 : -1.0;
    if (!(chaotic_x0 > lo && chaotic_x0 < 1.0)) {
      throw ConfigError("noise: chaotic initial condition outside the map's open domain");
    }
  }
}

void Schedule::validate() const {
  if (segments.empty()) {
    throw ConfigError("schedule: at least one segment required");
  }
  if (segments.front().start != 0) {
    throw ConfigError("schedule: first segment must start at iteration 0");
  }
  for (std::size_t k = 0; k < segments.size(); ++k) {
    segments[k].noise.validate();
    if (k > 0 && segments[k].start <= segments[k - 1].start) {
      throw ConfigError("schedule: segment starts must be strictly increasing");
    }
    if (segments[k].tukey_c && !(*segments[k].tukey_c > 0.0)) {
      throw ConfigError("schedule: segment threshold c must be positive");
    }
  }
}

std::size_t Schedule::segment_index(std::uint64_t n) const {
  std::size_t k = 0;
  while (k + 1 < segments.size() && segments[k + 1].start <= n) {
    ++k;
  }
  return k;
}

namespace {

double chaotic_map(int variant, double x) {
  if (variant == 1) {
    return 4.0 * x * (1.0 - x);
  }
  return x * (4.0 * x * x - 3.0);
}

// Invariant (arcsine) density moments.
double chaotic_normalise(int variant, double x) {
  if (variant == 1) {
    return (x - 0.5) * std::sqrt(8.0);
  }
  return x * std::numbers::sqrt2;
}

}  // namespace

std::vector<double> chaotic_raw(int variant, double x0, std::size_t count) {
  NoiseSpec probe;
  probe.kind = NoiseKind::logistic_chaotic;
  probe.chaotic_variant = variant;
  probe.chaotic_x0 = x0;
  probe.validate();
  std::vector<double> out(count);
  double x = x0;
  for (auto& v : out) {
    x = chaotic_map(variant, x);
    v = x;
  }
  return out;
}

std::vector<double> logistic_chaotic(int variant, std::size_t count, double x0) {
  auto out = chaotic_raw(variant, x0, count);
  for (auto& v : out) {
    v = chaotic_normalise(variant, v);
  }
  return out;
}

double gaussian_std(const NoiseSpec& spec, double signal_power) {
  if (spec.snr_db) {
    return std::sqrt(signal_power / std::pow(10.0, *spec.snr_db / 10.0));
  }
  return spec.scale;
}

NoiseSource::NoiseSource(Schedule schedule, std::uint64_t seed, std::uint64_t gaussian_seed,
                         double signal_power)
    : schedule_(std::move(schedule)),
      rng_(seed),
      gaussian_rng_(gaussian_seed),
      signal_power_(signal_power) {
  schedule_.validate();
  chaotic_state_ = schedule_.segments.front().noise.chaotic_x0;
}

double NoiseSource::draw(const NoiseSpec& spec) {
  switch (spec.kind) {
    case NoiseKind::none:
      return 0.0;
    case NoiseKind::alpha_stable:
      return sample_alpha_stable(spec.alpha, spec.scale, rng_);
    case NoiseKind::gaussian:
      return gaussian_std(spec, signal_power_) * rng_.normal();
    case NoiseKind::mixed: {
      const double impulsive = sample_alpha_stable(spec.alpha, spec.scale, rng_);
      return impulsive + gaussian_std(spec, signal_power_) * gaussian_rng_.normal();
    }
    case NoiseKind::logistic_chaotic:
      chaotic_state_ = chaotic_map(spec.chaotic_variant, chaotic_state_);
      return spec.scale * chaotic_normalise(spec.chaotic_variant, chaotic_state_);
  }
  return 0.0;
}

double NoiseSource::next_sample(std::uint64_t n) {
  if (n != expected_n_) {
    throw InputError("noise source: samples must be drawn in order, expected n=" +
                     std::to_string(expected_n_) + ", got " + std::to_string(n));
  }
  ++expected_n_;
  const std::size_t k = schedule_.segment_index(n);
  if (k != current_segment_) {
    current_segment_ = k;
    chaotic_state_ = schedule_.segments[k].noise.chaotic_x0;
  }
  return draw(schedule_.segments[k].noise);
}

std::vector<double> NoiseSource::generate(std::size_t count) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = next_sample(expected_n_);
  }
  return out;
}

void InputModel::validate() const {
  if (kind == InputKind::ar1 && !(std::fabs(pole) < 1.0)) {
    throw ConfigError("input: AR(1) pole must satisfy |pole| < 1, got " + std::to_string(pole));
  }
}

std::vector<double> ar1_input(double pole, std::size_t count, Rng& rng) {
  if (!(std::fabs(pole) < 1.0)) {
    throw ConfigError("ar1: unstable pole " + std::to_string(pole));
  }
  std::vector<double> out(count);
  if (count == 0) {
    return out;
  }
  out[0] = rng.normal() / std::sqrt(1.0 - pole * pole);
  for (std::size_t n = 1; n < count; ++n) {
    out[n] = pole * out[n - 1] + rng.normal();
  }
  return out;
}

std::vector<double> generate_input(const InputModel& model, std::size_t count, Rng& rng) {
  model.validate();
  return ar1_input(model.kind == InputKind::ar1 ? model.pole : 0.0, count, rng);
}

}  // namespace tbmcg
