#include "tbmcg/anc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "tbmcg/cg_filter.hpp"
#include "tbmcg/errors.hpp"
#include "tbmcg/linalg.hpp"
#include "tbmcg/parallel.hpp"

namespace tbmcg {

namespace {

void check_taps(std::span<const double> taps, const char* what) {
  if (taps.empty()) {
    throw ConfigError(std::string("anc: ") + what + " is empty");
  }
  for (double v : taps) {
    if (!std::isfinite(v)) {
      throw ConfigError(std::string("anc: ") + what + " has a non-finite coefficient");
    }
  }
}

}  // namespace

void AncPlant::validate() const {
  check_taps(primary_path, "primary path");
  check_taps(secondary_path, "secondary path");
  check_taps(secondary_estimate, "secondary-path estimate");
}

std::vector<double> load_path(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open path file '" + path.string() + "'");
  }
  std::vector<double> taps;
  std::optional<std::size_t> declared;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') {
      continue;
    }
    std::istringstream cell(line);
    if (!declared) {
      long long n = -1;
      if (!(cell >> n) || n <= 0) {
        throw ConfigError("path file '" + path.string() + "': bad length header");
      }
      declared = static_cast<std::size_t>(n);
      continue;
    }
    double v = 0.0;
    if (!(cell >> v)) {
      throw ConfigError("path file '" + path.string() + "': bad coefficient '" + line + "'");
    }
    taps.push_back(v);
  }
  if (!declared) {
    throw ConfigError("path file '" + path.string() + "': missing length header");
  }
  if (taps.size() != *declared) {
    throw ConfigError("path file '" + path.string() + "': header says " +
                      std::to_string(*declared) + " taps, found " + std::to_string(taps.size()));
  }
  check_taps(taps, "path file");
  return taps;
}

void save_path(std::span<const double> coefficients, const std::filesystem::path& path,
               std::string_view comment) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  if (!comment.empty()) {
    out << "# " << comment << '\n';
  }
  out << coefficients.size() << '\n';
  out.precision(17);
  for (double v : coefficients) {
    out << v << '\n';
  }
  if (!out) {
    throw IoError("write to '" + path.string() + "' failed");
  }
}

std::vector<double> perturb_path(std::span<const double> secondary, double mismatch, Rng& rng) {
  std::vector<double> out(secondary.begin(), secondary.end());
  if (mismatch == 0.0) {
    return out;
  }
  for (auto& v : out) {
    v *= 1.0 + mismatch * (2.0 * rng.uniform() - 1.0);
  }
  return out;
}

DelayLine::DelayLine(std::size_t length)
    : length_(length), head_(length), buffer_(2 * length, 0.0) {
  if (length == 0) {
    throw ConfigError("delay line: length must be at least 1");
  }
}

void DelayLine::push(double sample) {
  // Each sample is written twice so the newest-first window stays contiguous.
  if (head_ == 0) {
    std::copy_n(buffer_.begin(), length_ - 1, buffer_.begin() + static_cast<std::ptrdiff_t>(length_));
    head_ = length_;
  }
  --head_;
  buffer_[head_] = sample;
}

FirFilter::FirFilter(std::vector<double> taps) : taps_(std::move(taps)), line_(taps_.size()) {}

double FirFilter::push(double sample) {
  line_.push(sample);
  return dot(taps_, line_.view());
}

AnrState::AnrState(double smoothing) : rho(smoothing) {
  if (!(smoothing > 0.0 && smoothing < 1.0)) {
    throw ConfigError("anr: smoothing factor must lie in (0, 1)");
  }
}

double AnrState::update(double e, double d) {
  a_e = rho * a_e + (1.0 - rho) * std::fabs(e);
  a_d = rho * a_d + (1.0 - rho) * std::fabs(d);
  if (a_d == 0.0) {
    return a_e == 0.0 ? 0.0 : kDbFloor;
  }
  if (a_e == 0.0) {
    return -kDbFloor;
  }
  return clamp_db(20.0 * std::log10(a_e / a_d));
}

AncLoop::AncLoop(std::unique_ptr<AdaptiveFilter> controller, const AncPlant& plant)
    : controller_(std::move(controller)),
      primary_(plant.primary_path),
      secondary_(plant.secondary_path),
      estimate_(plant.secondary_estimate),
      reference_(controller_->length()),
      filtered_(controller_->length()) {
  plant.validate();
}

double AncLoop::step(double reference, double sensor_noise) {
  reference_.push(reference);
  last_d_ = primary_.push(reference);
  const double y = controller_->output(reference_.view());
  const double e = last_d_ - secondary_.push(y) + sensor_noise;
  filtered_.push(estimate_.push(reference));
  if (std::isfinite(e)) {
    controller_->adapt(filtered_.view(), e);
  }
  return e;
}

void AncConfig::validate() const {
  if (runs == 0) throw ConfigError("anc: runs must be at least 1");
  if (iterations == 0) throw ConfigError("anc: iterations must be at least 1");
  if (filter_length == 0) throw ConfigError("anc: filter_length must be at least 1");
  plant.validate();
  reference.validate();
  if (sensor_noise) {
    sensor_noise->validate();
  }
  if (!(estimate_mismatch >= 0.0 && estimate_mismatch < 1.0)) {
    throw ConfigError("anc: estimate_mismatch must lie in [0, 1)");
  }
  (void)AnrState(anr_rho);
  for (const auto& a : algorithms) {
    a.validate();
  }
}

AncRunResult run_anc_algorithm(const AncConfig& config, const AlgorithmSpec& spec,
                               std::span<const double> reference,
                               std::span<const double> sensor_noise) {
  AncLoop loop(make_filter(spec, config.filter_length), config.plant);
  auto* cg = dynamic_cast<CgFilter*>(&loop.controller());
  const bool scheduled_c = cg != nullptr && cg->estimator().has_value();
  AnrState anr(config.anr_rho);
  AncRunResult result;
  const std::size_t n = reference.size();
  result.anr_trace.resize(n);
  std::size_t segment = std::numeric_limits<std::size_t>::max();
  for (std::size_t t = 0; t < n; ++t) {
    if (scheduled_c) {
      const std::size_t k = config.reference.segment_index(t);
      if (k != segment) {
        segment = k;
        const auto& c = config.reference.segments[k].tukey_c;
        cg->set_threshold(c ? *c : spec.c);
      }
    }
    const double v = sensor_noise.empty() ? 0.0 : sensor_noise[t];
    const double e = loop.step(reference[t], v);
    if (loop.controller().diverged() || !std::isfinite(e)) {
      result.diverged = true;
      result.divergence_iteration = t;
      std::fill(result.anr_trace.begin() + static_cast<std::ptrdiff_t>(t), result.anr_trace.end(),
                std::numeric_limits<double>::quiet_NaN());
      break;
    }
    result.anr_trace[t] = anr.update(e, loop.last_disturbance());
  }
  return result;
}

namespace {

struct AncRunInputs {
  AncConfig config;  // carries the per-run secondary-path estimate
  std::vector<double> reference;
  std::vector<double> sensor;
};

AncRunInputs make_anc_inputs(const AncConfig& config, std::size_t run) {
  AncRunInputs in{config, {}, {}};
  if (config.estimate_mismatch > 0.0) {
    Rng rng(derive_seed(config.seed, run, Stream::path_mismatch));
    in.config.plant.secondary_estimate =
        perturb_path(config.plant.secondary_path, config.estimate_mismatch, rng);
  }
  NoiseSource ref(config.reference, derive_seed(config.seed, run, Stream::noise),
                  derive_seed(config.seed, run, Stream::noise_gaussian));
  in.reference = ref.generate(config.iterations);
  if (config.sensor_noise && config.sensor_noise->kind != NoiseKind::none) {
    // SNR of the sensor noise is relative to the uncontrolled disturbance.
    FirFilter primary(config.plant.primary_path);
    double power = 0.0;
    for (double x : in.reference) {
      const double d = primary.push(x);
      power += d * d;
    }
    power /= static_cast<double>(config.iterations);
    NoiseSource sensor(Schedule::single(*config.sensor_noise),
                       derive_seed(config.seed, run, Stream::sensor),
                       derive_seed(config.seed, run, Stream::sensor_gaussian), power);
    in.sensor = sensor.generate(config.iterations);
  }
  return in;
}

}  // namespace

std::vector<AncRunResult> run_anc_single(const AncConfig& config, std::size_t run) {
  const AncRunInputs in = make_anc_inputs(config, run);
  std::vector<AncRunResult> out;
  out.reserve(config.algorithms.size());
  for (const auto& spec : config.algorithms) {
    out.push_back(run_anc_algorithm(in.config, spec, in.reference, in.sensor));
  }
  return out;
}

AncResult run_anc_experiment(const AncConfig& config) {
  config.validate();
  const std::size_t algos = config.algorithms.size();
  AncResult result;
  result.divergence.assign(algos, {});
  std::vector<std::vector<double>> sums(algos, std::vector<double>(config.iterations, 0.0));
  result.curves.resize(algos);
  for (std::size_t a = 0; a < algos; ++a) {
    result.curves[a].label = config.algorithms[a].label;
    result.curves[a].metric = Metric::anr_db;
  }
  ordered_parallel_for(
      config.runs, config.jobs, [&](std::size_t run) { return run_anc_single(config, run); },
      [&](std::size_t, std::vector<AncRunResult>&& runs) {
        for (std::size_t a = 0; a < algos; ++a) {
          result.divergence[a].push_back(runs[a].divergence_iteration);
          if (runs[a].diverged) {
            ++result.curves[a].diverged_runs;
            continue;
          }
          ++result.curves[a].runs_averaged;
          for (std::size_t t = 0; t < config.iterations; ++t) {
            sums[a][t] += runs[a].anr_trace[t];
          }
        }
      });
  for (std::size_t a = 0; a < algos; ++a) {
    auto& c = result.curves[a];
    c.values.assign(config.iterations, std::numeric_limits<double>::quiet_NaN());
    if (c.runs_averaged > 0) {
      const double k = static_cast<double>(c.runs_averaged);
      for (std::size_t t = 0; t < config.iterations; ++t) {
        c.values[t] = sums[a][t] / k;
      }
    }
  }
  return result;
}

AncPlant default_anc_plant() {
  // Windowed-sinc band-pass (Hamming), normalised band edges in cycles/sample.
  auto bandpass = [](std::size_t taps, double lo, double hi, std::size_t delay) {
    std::vector<double> h(taps + delay, 0.0);
    const double mid = (static_cast<double>(taps) - 1.0) / 2.0;
    for (std::size_t k = 0; k < taps; ++k) {
      const double t = static_cast<double>(k) - mid;
      auto sinc = [](double f, double t) {
        return t == 0.0 ? 2.0 * f : std::sin(2.0 * std::numbers::pi * f * t) / (std::numbers::pi * t);
      };
      const double w = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                                                 (static_cast<double>(taps) - 1.0));
      h[k + delay] = (sinc(hi, t) - sinc(lo, t)) * w;
    }
    return h;
  };
  AncPlant p;
  // Acoustic lead-in on the primary path keeps the ideal controller causal.
  p.primary_path = bandpass(32, 0.05, 0.40, 8);
  p.secondary_path = bandpass(14, 0.05, 0.45, 2);
  p.secondary_estimate = p.secondary_path;
  return p;
}

}  // namespace tbmcg
