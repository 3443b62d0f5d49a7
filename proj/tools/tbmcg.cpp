// tbmcg command-line driver: experiments, noise and op-count checks.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tbmcg/audit.hpp"
#include "tbmcg/config.hpp"
#include "tbmcg/errors.hpp"
#include "tbmcg/metrics_io.hpp"
#include "tbmcg/noise.hpp"
#include "tbmcg/sysid.hpp"

#ifndef TBMCG_DEFAULT_PRESET_DIR
#define TBMCG_DEFAULT_PRESET_DIR "configs/presets"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kConfig = 2, kAllDiverged = 3, kIo = 4 };

// Thrown after the error line has been printed.
struct Exit {
  int code;
};

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += (ch == '\n') ? ' ' : ch;
  }
  return out;
}

[[noreturn]] void fail(int code, const char* kind, const std::string& message) {
  std::cerr << "error: kind=" << kind << " message=\"" << escape(message) << "\"\n";
  throw Exit{code};
}

struct RunOptions {
  std::string config;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> iterations;
  std::optional<std::size_t> jobs;
  std::string out;
};

void add_run_options(CLI::App* cmd, RunOptions& o) {
  auto* cfg = cmd->add_option("--config", o.config, "Experiment config file (JSON)");
  auto* pre = cmd->add_option("--preset", o.preset, "Shipped preset: fig3a fig3b fig4a fig4b fig5 fig6");
  cfg->excludes(pre);
  cmd->add_option("--seed", o.seed, "Master seed override");
  cmd->add_option("--runs", o.runs, "Monte Carlo run count override")->check(CLI::PositiveNumber);
  cmd->add_option("--iters", o.iterations, "Iteration count override")->check(CLI::PositiveNumber);
  cmd->add_option("--jobs", o.jobs, "Worker threads (0 = all cores)");
  cmd->add_option("--out", o.out, "Output root (default $TBMCG_OUT or ./runs)");
}

fs::path preset_dir() {
  if (const char* env = std::getenv("TBMCG_PRESET_DIR"); env && *env) return env;
  return TBMCG_DEFAULT_PRESET_DIR;
}

fs::path output_root(const RunOptions& o) {
  if (!o.out.empty()) return o.out;
  if (const char* env = std::getenv("TBMCG_OUT"); env && *env) return env;
  return "runs";
}

tbmcg::ExperimentConfig load(const RunOptions& o, const std::string& expected_kind,
                             json& overrides) {
  if (o.config.empty() && o.preset.empty()) {
    fail(kConfig, "config", "one of --config or --preset is required");
  }
  fs::path file = o.config;
  if (!o.preset.empty()) {
    file = preset_dir() / (o.preset + ".json");
    if (!fs::exists(file)) fail(kConfig, "config", "unknown preset '" + o.preset + "'");
  }
  tbmcg::ExperimentConfig cfg = tbmcg::load_config(file);
  const std::string kind = tbmcg::experiment_kind(cfg);
  if (kind != expected_kind) {
    fail(kConfig, "config",
         "'" + file.string() + "' has experiment '" + kind + "', expected '" + expected_kind + "'");
  }
  overrides = json::object();
  if (o.seed) {
    tbmcg::override_seed(cfg, *o.seed);
    overrides["seed"] = *o.seed;
  }
  if (o.runs) {
    tbmcg::override_runs(cfg, *o.runs);
    overrides["runs"] = *o.runs;
  }
  if (o.iterations) {
    tbmcg::override_iterations(cfg, *o.iterations);
    overrides["iterations"] = *o.iterations;
  }
  if (o.jobs) tbmcg::override_jobs(cfg, *o.jobs);
  std::visit([](auto& c) {
    if constexpr (std::is_same_v<std::decay_t<decltype(c)>, tbmcg::SweepConfig>) {
      c.base.validate();
    } else {
      c.validate();
    }
  }, cfg);
  return cfg;
}

fs::path prepare_dir(const RunOptions& o, const tbmcg::ExperimentConfig& cfg,
                     const json& resolved, std::string& name) {
  std::visit([&](const auto& c) {
    if constexpr (std::is_same_v<std::decay_t<decltype(c)>, tbmcg::SweepConfig>) {
      name = c.base.name;
    } else {
      name = c.name;
    }
  }, cfg);
  const fs::path dir = output_root(o) / (tbmcg::experiment_kind(cfg) + "-" + name + "-" +
                                         tbmcg::config_hash(resolved));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(kIo, "io", "cannot create '" + dir.string() + "': " + ec.message());
  return dir;
}

int finish(const fs::path& dir, const std::vector<tbmcg::LearningCurve>& curves,
           json meta) {
  tbmcg::write_curves(curves, dir / "curves.csv");
  tbmcg::write_json(meta, dir / "metadata.json");
  bool any_alive = curves.empty();
  for (const auto& c : curves) {
    std::printf("%-18s final=%9.3f dB  runs=%zu  diverged=%zu\n", c.column_name().c_str(),
                c.final_value(), c.runs_averaged, c.diverged_runs);
    any_alive = any_alive || c.runs_averaged > 0;
  }
  std::printf("wrote %s\n", dir.string().c_str());
  return any_alive ? kOk : kAllDiverged;
}

json make_meta(const std::string& command, const json& resolved,
               const std::vector<tbmcg::LearningCurve>& curves, const json& overrides) {
  json meta = tbmcg::curves_metadata(resolved, curves);
  meta["command"] = command;
  meta["config_hash"] = tbmcg::config_hash(resolved);
  meta["overrides"] = overrides;
  return meta;
}

int cmd_sysid(const RunOptions& o) {
  json overrides;
  auto cfg = load(o, "sysid", overrides);
  const json resolved = tbmcg::to_json(cfg);
  std::string name;
  const fs::path dir = prepare_dir(o, cfg, resolved, name);
  const auto curves = tbmcg::run_experiment(std::get<tbmcg::SysidConfig>(cfg));
  return finish(dir, curves, make_meta("sysid", resolved, curves, overrides));
}

int cmd_sweep(const RunOptions& o) {
  json overrides;
  auto cfg = load(o, "sweep-c", overrides);
  const json resolved = tbmcg::to_json(cfg);
  std::string name;
  const fs::path dir = prepare_dir(o, cfg, resolved, name);
  const auto& sweep = std::get<tbmcg::SweepConfig>(cfg);
  const auto curves = tbmcg::c_sweep(sweep.base, sweep.tbmcg, sweep.c_values);
  return finish(dir, curves, make_meta("sweep-c", resolved, curves, overrides));
}

int cmd_anc(const RunOptions& o) {
  json overrides;
  auto cfg = load(o, "anc", overrides);
  const json resolved = tbmcg::to_json(cfg);
  std::string name;
  const fs::path dir = prepare_dir(o, cfg, resolved, name);
  const auto& anc = std::get<tbmcg::AncConfig>(cfg);
  const auto result = tbmcg::run_anc_experiment(anc);

  const fs::path log = dir / "divergence.csv";
  std::ofstream out(log);
  if (!out) fail(kIo, "io", "cannot write '" + log.string() + "'");
  out << "algorithm,run,iteration\n";
  for (std::size_t a = 0; a < result.divergence.size(); ++a) {
    for (std::size_t r = 0; r < result.divergence[a].size(); ++r) {
      const auto& it = result.divergence[a][r];
      out << anc.algorithms[a].label << ',' << r << ',';
      if (it) out << *it;
      out << '\n';
    }
  }
  if (!out) fail(kIo, "io", "write failed for '" + log.string() + "'");
  return finish(dir, result.curves, make_meta("anc", resolved, result.curves, overrides));
}

int cmd_noise_check(const std::vector<double>& alphas, std::size_t draws, std::uint64_t seed) {
  const double ts[] = {0.5, 1.0, 2.0};
  for (double alpha : alphas) {
    if (!(alpha > 0.0 && alpha <= 2.0)) {
      fail(kConfig, "config", "alpha must lie in (0, 2]");
    }
    tbmcg::Rng rng(tbmcg::derive_seed(seed, 0, tbmcg::Stream::noise));
    std::vector<double> x(draws);
    for (auto& v : x) v = tbmcg::sample_alpha_stable(alpha, 1.0, rng);
    double worst = 0.0;
    std::printf("alpha=%.3g draws=%zu\n", alpha, draws);
    for (double t : ts) {
      const double emp = tbmcg::empirical_cf(x, t);
      const double ref = std::exp(-std::pow(std::abs(t), alpha));
      worst = std::max(worst, std::abs(emp - ref));
      std::printf("  cf(t=%.1f) empirical=%.5f expected=%.5f\n", t, emp, ref);
    }
    std::printf("  max |cf error| = %.5f\n", worst);
    if (alpha == 2.0) {
      tbmcg::Rng g(tbmcg::derive_seed(seed, 0, tbmcg::Stream::noise_gaussian));
      std::vector<double> y(draws);
      for (auto& v : y) v = std::sqrt(2.0) * g.normal();
      const auto ks = tbmcg::ks_two_sample(x, y);
      std::printf("  two-sample KS vs N(0,2): D=%.5f p=%.4f (%s at 1%%)\n", ks.statistic,
                  ks.p_value, ks.p_value >= 0.01 ? "consistent" : "rejected");
    }
  }
  return kOk;
}

int cmd_opcount(const std::vector<std::size_t>& lengths) {
  using tbmcg::AlgorithmKind;
  const AlgorithmKind kinds[] = {AlgorithmKind::cg,   AlgorithmKind::tbmcg, AlgorithmKind::rls,
                                 AlgorithmKind::lmm,  AlgorithmKind::nmcc,  AlgorithmKind::lms,
                                 AlgorithmKind::nlms, AlgorithmKind::robust_nlms,
                                 AlgorithmKind::log_lms};
  std::printf("%-12s %4s %10s %10s %10s %10s %5s %5s\n", "algorithm", "L", "mults", "table",
              "adds", "table", "cmp", "exp");
  for (std::size_t L : lengths) {
    if (L == 0) fail(kConfig, "config", "filter length must be positive");
    for (auto kind : kinds) {
      tbmcg::AlgorithmSpec spec;
      spec.kind = kind;
      const auto ops = tbmcg::measure_step_ops(spec, L);
      const auto ref = tbmcg::reference_cost(kind, L, spec.window);
      auto cell = [](std::optional<std::int64_t> v) {
        return v ? std::to_string(*v) : std::string("-");
      };
      std::printf("%-12s %4zu %10llu %10s %10llu %10s %5llu %5llu\n",
                  std::string(tbmcg::to_string(kind)).c_str(), L,
                  static_cast<unsigned long long>(ops.mults),
                  cell(ref ? std::optional(ref->mults) : std::nullopt).c_str(),
                  static_cast<unsigned long long>(ops.adds),
                  cell(ref ? std::optional(ref->adds) : std::nullopt).c_str(),
                  static_cast<unsigned long long>(ops.comparisons),
                  static_cast<unsigned long long>(ops.specials));
    }
    tbmcg::AlgorithmSpec tb;
    const auto out = tbmcg::measure_step_ops(tb, L, true);
    std::printf("%-12s %4zu %10llu %10s %10llu %10s %5llu %5llu\n", "tbmcg/reject", L,
                static_cast<unsigned long long>(out.mults), "-",
                static_cast<unsigned long long>(out.adds), "-",
                static_cast<unsigned long long>(out.comparisons),
                static_cast<unsigned long long>(out.specials));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tukey biweight M-estimate conjugate-gradient adaptive filtering experiments"};
  app.set_version_flag("--version", std::string(tbmcg::tool_version()));
  app.require_subcommand(1);

  RunOptions sysid_opts, anc_opts, sweep_opts;
  auto* sysid = app.add_subcommand("sysid", "System identification learning curves (NMSD)");
  add_run_options(sysid, sysid_opts);
  auto* anc = app.add_subcommand("anc", "Active noise control learning curves (ANR)");
  add_run_options(anc, anc_opts);
  auto* sweep = app.add_subcommand("sweep-c", "TbMCG learning curves over Tukey thresholds");
  add_run_options(sweep, sweep_opts);

  std::vector<double> alphas{2.0};
  std::size_t draws = 1000000;
  std::uint64_t noise_seed = 1;
  auto* noise = app.add_subcommand("noise-check", "Characteristic-function check of the SaS sampler");
  noise->add_option("--alpha", alphas, "Characteristic exponent(s)");
  noise->add_option("--draws", draws, "Samples per alpha")->check(CLI::PositiveNumber);
  noise->add_option("--seed", noise_seed, "Master seed");

  std::vector<std::size_t> lengths{8, 16, 32, 64};
  auto* ops = app.add_subcommand("opcount-audit", "Measured per-step operation counts");
  ops->add_option("--lengths", lengths, "Filter lengths");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::Success& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      fail(kConfig, "usage", e.what());
    }
    try {
      if (*sysid) return cmd_sysid(sysid_opts);
      if (*anc) return cmd_anc(anc_opts);
      if (*sweep) return cmd_sweep(sweep_opts);
      if (*noise) return cmd_noise_check(alphas, draws, noise_seed);
      if (*ops) return cmd_opcount(lengths);
    } catch (const tbmcg::IoError& e) {
      fail(kIo, "io", e.what());
    } catch (const std::invalid_argument& e) {
      fail(kConfig, "config", e.what());
    } catch (const fs::filesystem_error& e) {
      fail(kIo, "io", e.what());
    } catch (const std::exception& e) {
      fail(kInternal, "internal", e.what());
    }
  } catch (const Exit& e) {
    return e.code;
  }
  return kOk;
}
