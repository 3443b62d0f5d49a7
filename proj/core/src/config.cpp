#include "tbmcg/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>

#include "tbmcg/errors.hpp"

namespace tbmcg {

using nlohmann::json;

namespace {

void reject_unknown(const json& doc, std::initializer_list<const char*> allowed, const char* where) {
  if (!doc.is_object()) {
    throw ConfigError(std::string(where) + ": expected an object");
  }
  std::set<std::string> keys(allowed.begin(), allowed.end());
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!keys.count(it.key())) {
      throw ConfigError(std::string(where) + ": unknown key '" + it.key() + "'");
    }
  }
}

template <typename T>
T get_or(const json& doc, const char* key, T fallback) {
  auto it = doc.find(key);
  if (it == doc.end()) {
    return fallback;
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config: key '") + key + "' has the wrong type");
  }
}

/// Number or the strings "inf"/"infinity".
double get_real(const json& doc, const char* key, double fallback) {
  auto it = doc.find(key);
  if (it == doc.end()) {
    return fallback;
  }
  if (it->is_string()) {
    const auto s = it->get<std::string>();
    if (s == "inf" || s == "infinity") {
      return std::numeric_limits<double>::infinity();
    }
    throw ConfigError(std::string("config: key '") + key + "' must be a number");
  }
  if (!it->is_number()) {
    throw ConfigError(std::string("config: key '") + key + "' must be a number");
  }
  return it->get<double>();
}

json real_to_json(double v) {
  if (std::isinf(v)) {
    return v > 0 ? json("inf") : json("-inf");
  }
  return v;
}

std::size_t get_count(const json& doc, const char* key, std::size_t fallback) {
  auto it = doc.find(key);
  if (it == doc.end()) {
    return fallback;
  }
  if (!it->is_number_integer() || it->get<long long>() < 0) {
    throw ConfigError(std::string("config: key '") + key + "' must be a non-negative integer");
  }
  return it->get<std::size_t>();
}

std::vector<double> get_vector(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end() || !it->is_array()) {
    throw ConfigError(std::string("config: key '") + key + "' must be an array of numbers");
  }
  std::vector<double> out;
  for (const auto& v : *it) {
    if (v.is_string() && (v == "inf" || v == "infinity")) {
      out.push_back(std::numeric_limits<double>::infinity());
    } else if (v.is_number()) {
      out.push_back(v.get<double>());
    } else {
      throw ConfigError(std::string("config: key '") + key + "' must hold numbers");
    }
  }
  return out;
}

InputModel parse_input(const json& doc) {
  reject_unknown(doc, {"kind", "pole"}, "input");
  InputModel m;
  const auto kind = get_or<std::string>(doc, "kind", "ar1");
  if (kind == "ar1") {
    m.kind = InputKind::ar1;
  } else if (kind == "white_gaussian") {
    m.kind = InputKind::white_gaussian;
    m.pole = 0.0;
  } else {
    throw ConfigError("input: unknown kind '" + kind + "'");
  }
  m.pole = get_real(doc, "pole", m.pole);
  m.validate();
  return m;
}

json to_json(const InputModel& m) {
  return {{"kind", m.kind == InputKind::ar1 ? "ar1" : "white_gaussian"}, {"pole", m.pole}};
}

std::vector<AlgorithmSpec> parse_roster(const json& doc) {
  auto it = doc.find("algorithms");
  if (it == doc.end()) {
    return {};
  }
  if (!it->is_array()) {
    throw ConfigError("config: 'algorithms' must be an array");
  }
  std::vector<AlgorithmSpec> out;
  std::set<std::string> labels;
  for (const auto& a : *it) {
    out.push_back(parse_algorithm(a));
    if (!labels.insert(out.back().label).second) {
      throw ConfigError("config: duplicate algorithm label '" + out.back().label + "'");
    }
  }
  return out;
}

json roster_to_json(const std::vector<AlgorithmSpec>& roster) {
  json arr = json::array();
  for (const auto& a : roster) {
    arr.push_back(to_json(a));
  }
  return arr;
}

SysidConfig parse_sysid_fields(const json& doc) {
  SysidConfig c;
  c.name = get_or<std::string>(doc, "name", "sysid");
  c.seed = get_or<std::uint64_t>(doc, "seed", c.seed);
  c.runs = get_count(doc, "runs", c.runs);
  c.iterations = get_count(doc, "iterations", c.iterations);
  c.filter_length = get_count(doc, "filter_length", c.filter_length);
  if (doc.contains("input")) c.input = parse_input(doc.at("input"));
  if (doc.contains("noise")) c.noise = parse_noise(doc.at("noise"));
  const auto avg = get_or<std::string>(doc, "averaging", "db");
  if (avg == "db") {
    c.averaging = Averaging::db;
  } else if (avg == "linear") {
    c.averaging = Averaging::linear;
  } else {
    throw ConfigError("config: averaging must be 'db' or 'linear'");
  }
  if (doc.contains("plant")) c.plant = get_vector(doc, "plant");
  c.algorithms = parse_roster(doc);
  return c;
}

json sysid_fields_to_json(const SysidConfig& c) {
  json j;
  j["name"] = c.name;
  j["seed"] = c.seed;
  j["runs"] = c.runs;
  j["iterations"] = c.iterations;
  j["filter_length"] = c.filter_length;
  j["input"] = to_json(c.input);
  j["noise"] = to_json(c.noise);
  j["averaging"] = c.averaging == Averaging::db ? "db" : "linear";
  if (c.plant) j["plant"] = *c.plant;
  j["algorithms"] = roster_to_json(c.algorithms);
  return j;
}

std::vector<double> resolve_path(const json& doc, const char* key,
                                 const std::filesystem::path& base_dir) {
  const auto& v = doc.at(key);
  if (v.is_array()) {
    return get_vector(doc, key);
  }
  if (!v.is_string()) {
    throw ConfigError(std::string("paths: '") + key + "' must be a file name or an array");
  }
  std::filesystem::path p = v.get<std::string>();
  if (p.is_relative()) {
    p = base_dir / p;
  }
  return load_path(p);
}

AncConfig parse_anc(const json& doc, const std::filesystem::path& base_dir) {
  reject_unknown(doc,
                 {"schema_version", "experiment", "name", "seed", "runs", "iterations",
                  "filter_length", "paths", "estimate_mismatch", "reference", "sensor_noise",
                  "anr_rho", "algorithms", "notes"},
                 "anc config");
  AncConfig c;
  c.name = get_or<std::string>(doc, "name", "anc");
  c.seed = get_or<std::uint64_t>(doc, "seed", c.seed);
  c.runs = get_count(doc, "runs", c.runs);
  c.iterations = get_count(doc, "iterations", c.iterations);
  c.filter_length = get_count(doc, "filter_length", c.filter_length);
  c.plant = default_anc_plant();
  if (doc.contains("paths")) {
    const auto& p = doc.at("paths");
    reject_unknown(p, {"primary", "secondary", "estimate"}, "paths");
    if (p.contains("primary")) c.plant.primary_path = resolve_path(p, "primary", base_dir);
    if (p.contains("secondary")) {
      c.plant.secondary_path = resolve_path(p, "secondary", base_dir);
      c.plant.secondary_estimate = c.plant.secondary_path;
    }
    if (p.contains("estimate")) {
      c.plant.secondary_estimate = resolve_path(p, "estimate", base_dir);
    }
  }
  c.estimate_mismatch = get_real(doc, "estimate_mismatch", 0.0);
  if (!doc.contains("reference") || !doc.at("reference").is_array()) {
    throw ConfigError("anc config: 'reference' must be an array of segments");
  }
  for (const auto& s : doc.at("reference")) {
    reject_unknown(s, {"start", "noise", "c"}, "reference segment");
    Segment seg;
    seg.start = get_or<std::uint64_t>(s, "start", 0);
    if (!s.contains("noise")) {
      throw ConfigError("reference segment: missing 'noise'");
    }
    seg.noise = parse_noise(s.at("noise"));
    if (s.contains("c")) seg.tukey_c = get_real(s, "c", 0.0);
    c.reference.segments.push_back(seg);
  }
  if (doc.contains("sensor_noise") && !doc.at("sensor_noise").is_null()) {
    c.sensor_noise = parse_noise(doc.at("sensor_noise"));
  }
  c.anr_rho = get_real(doc, "anr_rho", c.anr_rho);
  c.algorithms = parse_roster(doc);
  c.validate();
  return c;
}

json anc_to_json(const AncConfig& c) {
  json j;
  j["experiment"] = "anc";
  j["name"] = c.name;
  j["seed"] = c.seed;
  j["runs"] = c.runs;
  j["iterations"] = c.iterations;
  j["filter_length"] = c.filter_length;
  j["paths"] = {{"primary", c.plant.primary_path},
                {"secondary", c.plant.secondary_path},
                {"estimate", c.plant.secondary_estimate}};
  j["estimate_mismatch"] = c.estimate_mismatch;
  json segs = json::array();
  for (const auto& s : c.reference.segments) {
    json seg = {{"start", s.start}, {"noise", to_json(s.noise)}};
    if (s.tukey_c) seg["c"] = real_to_json(*s.tukey_c);
    segs.push_back(seg);
  }
  j["reference"] = segs;
  j["sensor_noise"] = c.sensor_noise ? to_json(*c.sensor_noise) : json(nullptr);
  j["anr_rho"] = c.anr_rho;
  j["algorithms"] = roster_to_json(c.algorithms);
  return j;
}

}  // namespace

AlgorithmSpec parse_algorithm(const json& doc) {
  reject_unknown(doc,
                 {"label", "kind", "mu", "epsilon", "lambda", "delta", "eta", "ridge",
                  "clamp_beta", "c", "sigma", "kappa", "window", "lambda_sigma"},
                 "algorithm");
  AlgorithmSpec s;
  if (!doc.contains("kind")) {
    throw ConfigError("algorithm: missing 'kind'");
  }
  s.kind = parse_algorithm_kind(get_or<std::string>(doc, "kind", ""));
  s.label = get_or<std::string>(doc, "label", std::string(to_string(s.kind)));
  s.mu = get_real(doc, "mu", s.mu);
  s.epsilon = get_real(doc, "epsilon", s.epsilon);
  s.lambda = get_real(doc, "lambda", s.lambda);
  s.delta = get_real(doc, "delta", s.delta);
  s.eta = get_real(doc, "eta", s.eta);
  s.ridge = get_real(doc, "ridge", s.ridge);
  s.clamp_beta = get_or<bool>(doc, "clamp_beta", s.clamp_beta);
  s.c = get_real(doc, "c", s.c);
  s.sigma = get_real(doc, "sigma", s.sigma);
  s.kappa = get_real(doc, "kappa", s.kappa);
  s.window = get_count(doc, "window", s.window);
  s.lambda_sigma = get_real(doc, "lambda_sigma", s.lambda_sigma);
  if (s.label.empty() || s.label.find(',') != std::string::npos) {
    throw ConfigError("algorithm: label must be non-empty and contain no commas");
  }
  s.validate();
  return s;
}

json to_json(const AlgorithmSpec& s) {
  json j = {{"label", s.label}, {"kind", std::string(to_string(s.kind))}};
  switch (s.kind) {
    case AlgorithmKind::lms:
      j["mu"] = s.mu;
      break;
    case AlgorithmKind::nlms:
      j["mu"] = s.mu;
      j["epsilon"] = s.epsilon;
      break;
    case AlgorithmKind::rls:
      j["lambda"] = s.lambda;
      j["delta"] = s.delta;
      break;
    case AlgorithmKind::lmm:
      j["mu"] = s.mu;
      j["window"] = s.window;
      j["lambda_sigma"] = s.lambda_sigma;
      break;
    case AlgorithmKind::nmcc:
      j["mu"] = s.mu;
      j["sigma"] = s.sigma;
      j["epsilon"] = s.epsilon;
      break;
    case AlgorithmKind::robust_nlms:
      j["mu"] = s.mu;
      j["epsilon"] = s.epsilon;
      j["window"] = s.window;
      break;
    case AlgorithmKind::log_lms:
      j["mu"] = s.mu;
      j["kappa"] = s.kappa;
      break;
    case AlgorithmKind::tbmcg:
      j["c"] = real_to_json(s.c);
      [[fallthrough]];
    case AlgorithmKind::cg:
      j["lambda"] = s.lambda;
      j["eta"] = s.eta;
      j["ridge"] = s.ridge;
      j["clamp_beta"] = s.clamp_beta;
      break;
  }
  return j;
}

NoiseSpec parse_noise(const json& doc) {
  reject_unknown(doc, {"kind", "alpha", "scale", "snr_db", "variant", "x0"}, "noise");
  NoiseSpec s;
  s.kind = parse_noise_kind(get_or<std::string>(doc, "kind", "alpha_stable"));
  s.alpha = get_real(doc, "alpha", s.alpha);
  s.scale = get_real(doc, "scale", s.scale);
  if (doc.contains("snr_db") && !doc.at("snr_db").is_null()) {
    s.snr_db = get_real(doc, "snr_db", 0.0);
  }
  s.chaotic_variant = get_or<int>(doc, "variant", s.chaotic_variant);
  s.chaotic_x0 = get_real(doc, "x0", s.chaotic_x0);
  s.validate();
  return s;
}

json to_json(const NoiseSpec& s) {
  json j = {{"kind", std::string(to_string(s.kind))}};
  switch (s.kind) {
    case NoiseKind::none:
      break;
    case NoiseKind::alpha_stable:
      j["alpha"] = s.alpha;
      j["scale"] = s.scale;
      break;
    case NoiseKind::gaussian:
      j["scale"] = s.scale;
      if (s.snr_db) j["snr_db"] = *s.snr_db;
      break;
    case NoiseKind::mixed:
      j["alpha"] = s.alpha;
      j["scale"] = s.scale;
      j["snr_db"] = *s.snr_db;
      break;
    case NoiseKind::logistic_chaotic:
      j["variant"] = s.chaotic_variant;
      j["x0"] = s.chaotic_x0;
      j["scale"] = s.scale;
      break;
  }
  return j;
}

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) {
    throw ConfigError("config: top level must be an object");
  }
  const int version = get_or<int>(doc, "schema_version", kConfigSchemaVersion);
  if (version != kConfigSchemaVersion) {
    throw ConfigError("config: unsupported schema_version " + std::to_string(version));
  }
  const auto kind = get_or<std::string>(doc, "experiment", "");
  if (kind == "sysid") {
    reject_unknown(doc,
                   {"schema_version", "experiment", "name", "seed", "runs", "iterations",
                    "filter_length", "input", "noise", "averaging", "plant", "algorithms",
                    "notes"},
                   "sysid config");
    SysidConfig c = parse_sysid_fields(doc);
    c.validate();
    return c;
  }
  if (kind == "sweep-c") {
    reject_unknown(doc,
                   {"schema_version", "experiment", "name", "seed", "runs", "iterations",
                    "filter_length", "input", "noise", "averaging", "plant", "tbmcg", "c_values",
                    "notes"},
                   "sweep-c config");
    SweepConfig c;
    c.base = parse_sysid_fields(doc);
    json tb = doc.contains("tbmcg") ? doc.at("tbmcg") : json::object();
    if (!tb.contains("kind")) tb["kind"] = "tbmcg";
    c.tbmcg = parse_algorithm(tb);
    c.c_values = get_vector(doc, "c_values");
    if (c.c_values.empty()) {
      throw ConfigError("sweep-c config: c_values is empty");
    }
    for (double v : c.c_values) {
      if (!(v > 0.0)) throw ConfigError("sweep-c config: thresholds must be positive");
    }
    c.base.validate();
    return c;
  }
  if (kind == "anc") {
    return parse_anc(doc, base_dir);
  }
  throw ConfigError("config: 'experiment' must be one of sysid, sweep-c, anc");
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw IoError("cannot open config '" + file.string() + "'");
  }
  json doc;
  try {
    doc = json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + file.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc, file.parent_path());
}

json to_json(const ExperimentConfig& config) {
  json j;
  if (const auto* s = std::get_if<SysidConfig>(&config)) {
    j = sysid_fields_to_json(*s);
    j["experiment"] = "sysid";
  } else if (const auto* w = std::get_if<SweepConfig>(&config)) {
    j = sysid_fields_to_json(w->base);
    j.erase("algorithms");
    j["experiment"] = "sweep-c";
    j["tbmcg"] = to_json(w->tbmcg);
    json cs = json::array();
    for (double c : w->c_values) cs.push_back(real_to_json(c));
    j["c_values"] = cs;
  } else {
    j = anc_to_json(std::get<AncConfig>(config));
  }
  j["schema_version"] = kConfigSchemaVersion;
  return j;
}

std::string config_hash(const json& doc) {
  const std::string text = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string experiment_kind(const ExperimentConfig& config) {
  if (std::holds_alternative<SysidConfig>(config)) return "sysid";
  if (std::holds_alternative<SweepConfig>(config)) return "sweep-c";
  return "anc";
}

namespace {

template <typename F>
void visit_common(ExperimentConfig& config, F&& f) {
  if (auto* s = std::get_if<SysidConfig>(&config)) {
    f(s->seed, s->runs, s->iterations, s->jobs);
  } else if (auto* w = std::get_if<SweepConfig>(&config)) {
    f(w->base.seed, w->base.runs, w->base.iterations, w->base.jobs);
  } else {
    auto& a = std::get<AncConfig>(config);
    f(a.seed, a.runs, a.iterations, a.jobs);
  }
}

}  // namespace

void override_seed(ExperimentConfig& config, std::uint64_t seed) {
  visit_common(config, [&](auto& s, auto&, auto&, auto&) { s = seed; });
}

void override_runs(ExperimentConfig& config, std::size_t runs) {
  if (runs == 0) throw ConfigError("--runs must be at least 1");
  visit_common(config, [&](auto&, auto& r, auto&, auto&) { r = runs; });
}

void override_iterations(ExperimentConfig& config, std::size_t iterations) {
  if (iterations == 0) throw ConfigError("--iters must be at least 1");
  visit_common(config, [&](auto&, auto&, auto& i, auto&) { i = iterations; });
}

void override_jobs(ExperimentConfig& config, std::size_t jobs) {
  visit_common(config, [&](auto&, auto&, auto&, auto& j) { j = jobs; });
}

}  // namespace tbmcg
