#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace tbmcg {

/// dB values are clamped to [-kDbFloor, kDbFloor] so every output is finite.
inline constexpr double kDbFloor = 300.0;

double clamp_db(double db);

enum class Metric { nmsd_db, anr_db };

std::string_view to_string(Metric metric);

/// Per-iteration trace averaged over the Monte Carlo runs that stayed finite.
struct LearningCurve {
  std::string label;
  Metric metric = Metric::nmsd_db;
  std::vector<double> values;
  std::size_t runs_averaged = 0;
  std::size_t diverged_runs = 0;

  std::string column_name() const;
  double final_value() const { return values.empty() ? 0.0 : values.back(); }
  /// Mean of values[first, last).
  double mean_over(std::size_t first, std::size_t last) const;
};

/// CSV with columns `iteration,<label>_<metric>,...` in the given order,
/// values printed with 6 significant digits. Throws InputError on unequal
/// lengths, IoError on write failure.
void write_curves(std::span<const LearningCurve> curves, const std::filesystem::path& path);

/// Inverse of write_curves. Metric and label are recovered from the header.
std::vector<LearningCurve> read_curves(const std::filesystem::path& path);

/// `iteration,value` dump of a raw stream.
void write_stream_csv(std::span<const double> values, const std::filesystem::path& path);

/// Centered moving average with an odd window; windows shrink at the ends.
LearningCurve smooth(const LearningCurve& curve, std::size_t window);

/// Pretty-printed JSON with a trailing newline.
void write_json(const nlohmann::json& doc, const std::filesystem::path& path);

/// Metadata sidecar: resolved config, per-curve run/divergence counts and
/// the dB floor convention.
nlohmann::json curves_metadata(const nlohmann::json& resolved_config,
                               std::span<const LearningCurve> curves);

std::string_view tool_version();

}  // namespace tbmcg
