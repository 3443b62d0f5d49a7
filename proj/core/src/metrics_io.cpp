#include "tbmcg/metrics_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tbmcg/errors.hpp"

namespace tbmcg {

double clamp_db(double db) {
  if (std::isnan(db)) {
    return db;
  }
  return std::clamp(db, -kDbFloor, kDbFloor);
}

std::string_view to_string(Metric metric) {
  return metric == Metric::nmsd_db ? "nmsd_db" : "anr_db";
}

std::string LearningCurve::column_name() const {
  return label + "_" + std::string(to_string(metric));
}

double LearningCurve::mean_over(std::size_t first, std::size_t last) const {
  last = std::min(last, values.size());
  if (first >= last) {
    return 0.0;
  }
  double acc = 0.0;
  for (std::size_t i = first; i < last; ++i) {
    acc += values[i];
  }
  return acc / static_cast<double>(last - first);
}

namespace {

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open '" + path.string() + "' for writing");
  }
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) {
    throw IoError("write to '" + path.string() + "' failed");
  }
}

}  // namespace

void write_curves(std::span<const LearningCurve> curves, const std::filesystem::path& path) {
  const std::size_t rows = curves.empty() ? 0 : curves.front().values.size();
  for (const auto& c : curves) {
    if (c.values.size() != rows) {
      throw InputError("write_curves: curve '" + c.label + "' has " +
                       std::to_string(c.values.size()) + " values, expected " +
                       std::to_string(rows));
    }
  }
  std::ostringstream body;
  body << "iteration";
  for (const auto& c : curves) {
    body << ',' << c.column_name();
  }
  body << '\n';
  for (std::size_t i = 0; i < rows; ++i) {
    body << i;
    for (const auto& c : curves) {
      body << ',' << format_value(c.values[i]);
    }
    body << '\n';
  }
  auto out = open_for_write(path);
  out << body.str();
  finish(out, path);
}

std::vector<LearningCurve> read_curves(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path.string() + "' for reading");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw IoError("'" + path.string() + "' is empty");
  }
  std::vector<LearningCurve> curves;
  {
    std::istringstream header(line);
    std::string cell;
    std::getline(header, cell, ',');
    while (std::getline(header, cell, ',')) {
      LearningCurve c;
      for (Metric m : {Metric::nmsd_db, Metric::anr_db}) {
        const std::string suffix = "_" + std::string(to_string(m));
        if (cell.size() > suffix.size() &&
            cell.compare(cell.size() - suffix.size(), suffix.size(), suffix) == 0) {
          c.metric = m;
          c.label = cell.substr(0, cell.size() - suffix.size());
        }
      }
      if (c.label.empty()) {
        throw IoError("unrecognised column '" + cell + "' in '" + path.string() + "'");
      }
      curves.push_back(std::move(c));
    }
  }
  while (std::getline(in, line)) {
    if (line.empty()) {
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ',');
    for (auto& c : curves) {
      if (!std::getline(row, cell, ',')) {
        throw IoError("short row in '" + path.string() + "'");
      }
      c.values.push_back(std::stod(cell));
    }
  }
  return curves;
}

void write_stream_csv(std::span<const double> values, const std::filesystem::path& path) {
  std::ostringstream body;
  body << "iteration,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    body << i << ',' << format_value(values[i]) << '\n';
  }
  auto out = open_for_write(path);
  out << body.str();
  finish(out, path);
}

LearningCurve smooth(const LearningCurve& curve, std::size_t window) {
  if (window == 0 || window % 2 == 0) {
    throw InputError("smooth: window must be odd and positive, got " + std::to_string(window));
  }
  LearningCurve out = curve;
  const std::size_t n = curve.values.size();
  const std::size_t half = window / 2;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = std::min({half, i, n - 1 - i});
    double acc = 0.0;
    for (std::size_t k = i - r; k <= i + r; ++k) {
      acc += curve.values[k];
    }
    out.values[i] = acc / static_cast<double>(2 * r + 1);
  }
  return out;
}

void write_json(const nlohmann::json& doc, const std::filesystem::path& path) {
  auto out = open_for_write(path);
  out << doc.dump(2) << '\n';
  finish(out, path);
}

nlohmann::json curves_metadata(const nlohmann::json& resolved_config,
                               std::span<const LearningCurve> curves) {
  nlohmann::json meta;
  meta["tool"] = "tbmcg";
  meta["tool_version"] = std::string(tool_version());
  meta["db_floor"] = -kDbFloor;
  meta["db_floor_note"] = "dB values are clamped to [-300, 300]";
  meta["config"] = resolved_config;
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : curves) {
    cols.push_back({{"column", c.column_name()},
                    {"label", c.label},
                    {"runs_averaged", c.runs_averaged},
                    {"diverged_runs", c.diverged_runs}});
  }
  meta["curves"] = cols;
  return meta;
}

std::string_view tool_version() { return "1.0.0"; }

}  // namespace tbmcg
