#include "tbmcg/sysid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "tbmcg/errors.hpp"
#include "tbmcg/linalg.hpp"
#include "tbmcg/parallel.hpp"

namespace tbmcg {

void Plant::validate() const {
  if (h_o.empty()) {
    throw ConfigError("plant: empty weight vector");
  }
  double norm2 = 0.0;
  for (double w : h_o) {
    if (!std::isfinite(w)) {
      throw ConfigError("plant: non-finite coefficient");
    }
    norm2 += w * w;
  }
  if (!(norm2 > 0.0)) {
    throw ConfigError("plant: zero norm");
  }
}

Plant random_plant(std::size_t length, Rng& rng) {
  Plant p{std::vector<double>(length)};
  for (auto& w : p.h_o) {
    w = rng.normal();
  }
  const double norm = std::sqrt(squared_norm(p.h_o));
  for (auto& w : p.h_o) {
    w /= norm;
  }
  return p;
}

double nmsd_db(std::span<const double> h, std::span<const double> h_o) {
  if (h.size() != h_o.size()) {
    throw InputError("nmsd: length mismatch");
  }
  const double ref = squared_norm(h_o);
  if (!(ref > 0.0)) {
    throw InputError("nmsd: plant has zero norm");
  }
  double err = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double d = h[i] - h_o[i];
    err += d * d;
  }
  if (std::isnan(err)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (err == 0.0) {
    return -kDbFloor;
  }
  return clamp_db(10.0 * std::log10(err / ref));
}

void SysidConfig::validate() const {
  if (runs == 0) throw ConfigError("sysid: runs must be at least 1");
  if (iterations == 0) throw ConfigError("sysid: iterations must be at least 1");
  if (filter_length == 0) throw ConfigError("sysid: filter_length must be at least 1");
  input.validate();
  noise.validate();
  if (noise.kind == NoiseKind::logistic_chaotic) {
    throw ConfigError("sysid: chaotic streams are reference sources, not measurement noise");
  }
  for (const auto& a : algorithms) {
    a.validate();
  }
  if (plant) {
    if (plant->size() != filter_length) {
      throw ConfigError("sysid: fixed plant length differs from filter_length");
    }
    Plant{*plant}.validate();
  }
}

SysidData make_sysid_data(const SysidConfig& config, std::size_t run) {
  const std::size_t n = config.iterations;
  const std::size_t taps = config.filter_length;
  SysidData data;
  if (config.plant) {
    data.plant.h_o = *config.plant;
  } else {
    Rng plant_rng(derive_seed(config.seed, run, Stream::plant));
    data.plant = random_plant(taps, plant_rng);
  }
  Rng input_rng(derive_seed(config.seed, run, Stream::input));
  data.input = generate_input(config.input, n, input_rng);

  data.clean.assign(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double acc = 0.0;
    for (std::size_t k = 0; k < taps && k <= t; ++k) {
      acc += data.plant.h_o[k] * data.input[t - k];
    }
    data.clean[t] = acc;
  }
  const double signal_power = squared_norm(data.clean) / static_cast<double>(n);

  NoiseSource source(Schedule::single(config.noise), derive_seed(config.seed, run, Stream::noise),
                     derive_seed(config.seed, run, Stream::noise_gaussian), signal_power);
  data.noise = source.generate(n);
  data.desired.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    data.desired[t] = data.clean[t] + data.noise[t];
  }
  return data;
}

RunResult run_algorithm(const AlgorithmSpec& spec, std::size_t filter_length,
                        const SysidData& data) {
  auto filter = make_filter(spec, filter_length);
  const std::size_t n = data.input.size();
  RunResult result;
  result.nmsd_trace.resize(n);
  std::vector<double> x(filter_length, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t k = filter_length - 1; k > 0; --k) {
      x[k] = x[k - 1];
    }
    x[0] = data.input[t];
    filter->step(x, data.desired[t]);
    result.op_totals += filter->last_ops();
    if (filter->diverged()) {
      result.diverged = true;
      std::fill(result.nmsd_trace.begin() + static_cast<std::ptrdiff_t>(t),
                result.nmsd_trace.end(), std::numeric_limits<double>::quiet_NaN());
      break;
    }
    result.nmsd_trace[t] = nmsd_db(filter->weights(), data.plant.h_o);
  }
  auto w = filter->weights();
  result.final_weights.assign(w.begin(), w.end());
  return result;
}

std::vector<RunResult> run_single(const SysidConfig& config, std::size_t run) {
  const SysidData data = make_sysid_data(config, run);
  std::vector<RunResult> out;
  out.reserve(config.algorithms.size());
  for (const auto& spec : config.algorithms) {
    out.push_back(run_algorithm(spec, config.filter_length, data));
  }
  return out;
}

namespace {

/// Pointwise mean over finite runs, in dB or in the linear domain.
class CurveAccumulator {
 public:
  CurveAccumulator(std::string label, Metric metric, std::size_t length, Averaging mode)
      : mode_(mode), sum_(length, 0.0) {
    curve_.label = std::move(label);
    curve_.metric = metric;
  }

  void add(const std::vector<double>& trace, bool diverged) {
    if (diverged) {
      ++curve_.diverged_runs;
      return;
    }
    ++curve_.runs_averaged;
    for (std::size_t i = 0; i < sum_.size(); ++i) {
      sum_[i] += mode_ == Averaging::db ? trace[i] : std::pow(10.0, trace[i] / 10.0);
    }
  }

  LearningCurve finish() {
    curve_.values.assign(sum_.size(), std::numeric_limits<double>::quiet_NaN());
    if (curve_.runs_averaged > 0) {
      const double k = static_cast<double>(curve_.runs_averaged);
      for (std::size_t i = 0; i < sum_.size(); ++i) {
        const double mean = sum_[i] / k;
        curve_.values[i] =
            clamp_db(mode_ == Averaging::db ? mean : 10.0 * std::log10(std::max(mean, 1e-300)));
      }
    }
    return std::move(curve_);
  }

 private:
  Averaging mode_;
  std::vector<double> sum_;
  LearningCurve curve_;
};

}  // namespace

std::vector<LearningCurve> run_experiment(const SysidConfig& config) {
  config.validate();
  std::vector<CurveAccumulator> acc;
  acc.reserve(config.algorithms.size());
  for (const auto& spec : config.algorithms) {
    acc.emplace_back(spec.label, Metric::nmsd_db, config.iterations, config.averaging);
  }
  ordered_parallel_for(
      config.runs, config.jobs, [&](std::size_t run) { return run_single(config, run); },
      [&](std::size_t, std::vector<RunResult>&& results) {
        for (std::size_t a = 0; a < results.size(); ++a) {
          acc[a].add(results[a].nmsd_trace, results[a].diverged);
        }
      });
  std::vector<LearningCurve> curves;
  curves.reserve(acc.size());
  for (auto& a : acc) {
    curves.push_back(a.finish());
  }
  return curves;
}

std::string c_label(double c) {
  if (std::isinf(c)) {
    return "c=inf";
  }
  char buf[48];
  std::snprintf(buf, sizeof buf, "c=%g", c);
  return buf;
}

std::vector<LearningCurve> c_sweep(const SysidConfig& config, const AlgorithmSpec& base,
                                   std::span<const double> c_values) {
  if (c_values.empty()) {
    throw ConfigError("c sweep: no threshold values");
  }
  SysidConfig sweep = config;
  sweep.algorithms.clear();
  for (double c : c_values) {
    if (!(c > 0.0)) {
      throw ConfigError("c sweep: thresholds must be positive");
    }
    AlgorithmSpec spec = base;
    spec.kind = AlgorithmKind::tbmcg;
    spec.c = c;
    spec.label = c_label(c);
    sweep.algorithms.push_back(spec);
  }
  return run_experiment(sweep);
}

}  // namespace tbmcg
