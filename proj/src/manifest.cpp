#include "driftpool/manifest.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "driftpool/error.hpp"

namespace driftpool {

const std::vector<std::string> kManifestKeys = {
    "data", "column", "has_header", "synthetic", "synthetic_seed", "normalize",
    "mode", "forecaster", "lookback", "horizon", "hidden", "lr", "warm_epochs", "seed",
    "tau_mu", "tau_gene", "tau_l", "tau_safe", "tau_e", "tau_lr", "t_lr", "scope", "score",
    "evolution", "elimination", "gradient_abandonment", "optimizer_adjustment",
    "use_local_gene", "use_global_gene", "max_pool", "record_forecasts", "out",
};

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value,
                            const std::string& expected) {
  throw Error(ErrorKind::Validation,
              key + ": invalid value '" + value + "' (expected " + expected + ")");
}

double to_real(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size() || !std::isfinite(out)) {
    bad_value(key, v, "a finite real");
  }
  return out;
}

std::uint64_t to_count(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) bad_value(key, v, "a non-negative integer");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  bad_value(key, v, "true|false");
}

std::string real_text(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string bool_text(bool b) { return b ? "true" : "false"; }

std::string normalization_text(Normalization n) {
  switch (n) {
    case Normalization::None: return "none";
    case Normalization::Warm: return "warm";
    case Normalization::Whole: return "whole";
  }
  return "none";
}

}  // namespace

void RunManifest::set(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  CepConfig& cep = engine.cep;
  if (key == "data") data = v;
  else if (key == "column") column = v;
  else if (key == "has_header") has_header = to_bool(key, v);
  else if (key == "synthetic") synthetic = v;
  else if (key == "synthetic_seed") {
    if (v.empty()) synthetic_seed.reset();
    else synthetic_seed = to_count(key, v);
  } else if (key == "normalize") {
    if (v == "none") normalization = Normalization::None;
    else if (v == "warm") normalization = Normalization::Warm;
    else if (v == "whole") normalization = Normalization::Whole;
    else bad_value(key, v, "none|warm|whole");
  } else if (key == "mode") {
    if (v == "cep") mode = RunMode::Cep;
    else if (v == "baseline") mode = RunMode::Baseline;
    else bad_value(key, v, "cep|baseline");
  } else if (key == "forecaster") engine.forecaster = parse_forecaster_kind(v);
  else if (key == "lookback") engine.lookback = to_count(key, v);
  else if (key == "horizon") engine.horizon = to_count(key, v);
  else if (key == "hidden") engine.hidden = to_count(key, v);
  else if (key == "lr") {
    if (v.empty() || v == "default") engine.lr.reset();
    else engine.lr = to_real(key, v);
  } else if (key == "warm_epochs") engine.warm_epochs = to_count(key, v);
  else if (key == "seed") engine.seed = to_count(key, v);
  else if (key == "tau_mu") cep.tau_mu = to_real(key, v);
  else if (key == "tau_gene") cep.tau_gene = to_real(key, v);
  else if (key == "tau_l") cep.tau_l = to_real(key, v);
  else if (key == "tau_safe") cep.tau_safe = to_count(key, v);
  else if (key == "tau_e") cep.tau_e = to_real(key, v);
  else if (key == "tau_lr") cep.tau_lr = to_real(key, v);
  else if (key == "t_lr") cep.t_lr = to_count(key, v);
  else if (key == "scope") cep.scope = to_count(key, v);
  else if (key == "score") cep.retrieval = parse_retrieval_score(v);
  else if (key == "evolution") cep.evolution = to_bool(key, v);
  else if (key == "elimination") cep.elimination = to_bool(key, v);
  else if (key == "gradient_abandonment") cep.gradient_abandonment = to_bool(key, v);
  else if (key == "optimizer_adjustment") cep.optimizer_adjustment = to_bool(key, v);
  else if (key == "use_local_gene") cep.use_local_gene = to_bool(key, v);
  else if (key == "use_global_gene") cep.use_global_gene = to_bool(key, v);
  else if (key == "max_pool") {
    const auto n = to_count(key, v);
    if (n == 0) cep.max_pool_size.reset();
    else cep.max_pool_size = n;
  } else if (key == "record_forecasts") engine.record_forecasts = to_bool(key, v);
  else if (key == "out") out = v;
  else throw Error(ErrorKind::Validation, "unknown manifest key '" + key + "'");
}

RunManifest RunManifest::parse(const std::string& text) {
  RunManifest m;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorKind::Validation,
                  "manifest line " + std::to_string(lineno) + ": expected key = value");
    }
    try {
      m.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(e.kind(), "manifest line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return m;
}

RunManifest RunManifest::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open manifest '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::map<std::string, std::string> RunManifest::to_map() const {
  const CepConfig& cep = engine.cep;
  return {
      {"data", data},
      {"column", column},
      {"has_header", bool_text(has_header)},
      {"synthetic", synthetic},
      {"synthetic_seed", synthetic_seed ? std::to_string(*synthetic_seed) : ""},
      {"normalize", normalization_text(normalization)},
      {"mode", mode == RunMode::Cep ? "cep" : "baseline"},
      {"forecaster", std::string(to_string(engine.forecaster))},
      {"lookback", std::to_string(engine.lookback)},
      {"horizon", std::to_string(engine.horizon)},
      {"hidden", std::to_string(engine.hidden)},
      {"lr", engine.lr ? real_text(*engine.lr) : "default"},
      {"warm_epochs", std::to_string(engine.warm_epochs)},
      {"seed", std::to_string(engine.seed)},
      {"tau_mu", real_text(cep.tau_mu)},
      {"tau_gene", real_text(cep.tau_gene)},
      {"tau_l", real_text(cep.tau_l)},
      {"tau_safe", std::to_string(cep.tau_safe)},
      {"tau_e", real_text(cep.tau_e)},
      {"tau_lr", real_text(cep.tau_lr)},
      {"t_lr", std::to_string(cep.t_lr)},
      {"scope", std::to_string(cep.scope)},
      {"score", std::string(to_string(cep.retrieval))},
      {"evolution", bool_text(cep.evolution)},
      {"elimination", bool_text(cep.elimination)},
      {"gradient_abandonment", bool_text(cep.gradient_abandonment)},
      {"optimizer_adjustment", bool_text(cep.optimizer_adjustment)},
      {"use_local_gene", bool_text(cep.use_local_gene)},
      {"use_global_gene", bool_text(cep.use_global_gene)},
      {"max_pool", std::to_string(cep.max_pool_size.value_or(0))},
      {"record_forecasts", bool_text(engine.record_forecasts)},
      {"out", out},
  };
}

std::string RunManifest::serialize() const {
  const auto map = to_map();
  std::string text;
  for (const auto& key : kManifestKeys) text += key + " = " + map.at(key) + "\n";
  return text;
}

std::string RunManifest::config_hash() const {
  const auto map = to_map();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& key : kManifestKeys) {
    if (key == "out") continue;
    for (char c : key + "=" + map.at(key) + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string RunManifest::data_signature() const {
  const auto map = to_map();
  std::string sig;
  for (const char* key : {"data", "column", "has_header", "synthetic", "synthetic_seed",
                          "normalize", "lookback", "horizon"}) {
    sig += std::string(key) + "=" + map.at(key) + ";";
  }
  return sig;
}

void RunManifest::validate() const {
  if (data.empty() == synthetic.empty()) {
    throw Error(ErrorKind::Validation, "data/synthetic: exactly one data source must be given");
  }
  engine.validate();
}

LoadedSeries load_series(const RunManifest& manifest) {
  manifest.validate();
  LoadedSeries out;
  if (!manifest.data.empty()) {
    out.source = load_csv(manifest.data, manifest.column, manifest.has_header);
  } else {
    SyntheticSpec spec;
    if (manifest.synthetic == "default") {
      spec = SyntheticSpec::default_acceptance();
    } else {
      std::ifstream in(manifest.synthetic);
      if (!in) throw Error(ErrorKind::Io, "cannot open synthetic spec '" + manifest.synthetic + "'");
      std::ostringstream ss;
      ss << in.rdbuf();
      spec = SyntheticSpec::from_json(ss.str());
    }
    if (manifest.synthetic_seed) spec.seed = *manifest.synthetic_seed;
    auto stream = generate(spec);
    out.source.values = std::move(stream.values);
    out.source.name = "synthetic";
    out.source.origin = SyntheticOrigin{spec.seed};
    out.labels = std::move(stream.labels);
  }
  if (manifest.normalization != Normalization::None) {
    auto n = normalize(out.source.values, manifest.normalization == Normalization::Warm
                                              ? NormalizeFrom::WarmSegment
                                              : NormalizeFrom::Whole);
    out.source.values = std::move(n.values);
    out.norm_mean = n.mean;
    out.norm_std = n.std;
  }
  return out;
}

RunResult execute(const RunManifest& manifest, const LoadedSeries& series) {
  EngineConfig cfg = manifest.engine;
  cfg.record_genes = true;
  return manifest.mode == RunMode::Cep ? run(series.source.values, cfg)
                                       : run_baseline(series.source.values, cfg);
}

}  // namespace driftpool
