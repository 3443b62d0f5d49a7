#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tbmcg/algorithm.hpp"
#include "tbmcg/metrics_io.hpp"
#include "tbmcg/noise.hpp"
#include "tbmcg/op_counter.hpp"

namespace tbmcg {

/// Unknown FIR system h_o.
struct Plant {
  std::vector<double> h_o;

  void validate() const;
};

/// Unit-Gaussian taps normalised to unit Euclidean norm.
Plant random_plant(std::size_t length, Rng& rng);

/// 20 log10(||h - h_o|| / ||h_o||), clamped to [-300, 300] dB.
double nmsd_db(std::span<const double> h, std::span<const double> h_o);

enum class Averaging { db, linear };

struct SysidConfig {
  std::string name = "sysid";
  std::uint64_t seed = 1;
  std::size_t runs = 100;
  std::size_t iterations = 5000;
  std::size_t filter_length = 10;
  InputModel input;
  NoiseSpec noise;
  Averaging averaging = Averaging::db;
  std::vector<AlgorithmSpec> algorithms;
  /// Fixed plant for every run instead of a fresh random one.
  std::optional<std::vector<double>> plant;
  /// Worker threads; 0 = hardware concurrency. Not part of the result.
  std::size_t jobs = 0;

  void validate() const;
};

/// The data one Monte Carlo run feeds to every algorithm (common random
/// numbers across the roster).
struct SysidData {
  Plant plant;
  std::vector<double> input;    // x(0..N-1)
  std::vector<double> clean;    // h_o' x(n)
  std::vector<double> noise;    // v(n)
  std::vector<double> desired;  // clean + noise
};

SysidData make_sysid_data(const SysidConfig& config, std::size_t run);

struct RunResult {
  std::vector<double> nmsd_trace;
  bool diverged = false;
  OpCounter op_totals;
  std::vector<double> final_weights;
};

/// Drives one algorithm over one run's data. The tap-delay line starts at 0.
RunResult run_algorithm(const AlgorithmSpec& spec, std::size_t filter_length,
                        const SysidData& data);

/// All algorithms on one run, in roster order.
std::vector<RunResult> run_single(const SysidConfig& config, std::size_t run);

/// NMSD learning curve per algorithm (roster order), averaged pointwise
/// over the runs that did not diverge.
std::vector<LearningCurve> run_experiment(const SysidConfig& config);

/// TbMCG curve per threshold with identical seeds. `base` supplies every
/// TbMCG parameter except c; labels are "c=<value>".
std::vector<LearningCurve> c_sweep(const SysidConfig& config, const AlgorithmSpec& base,
                                   std::span<const double> c_values);

/// Label used by c_sweep for a threshold.
std::string c_label(double c);

}  // namespace tbmcg
