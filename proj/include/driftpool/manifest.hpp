#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "driftpool/data.hpp"
#include "driftpool/engine.hpp"

namespace driftpool {

enum class RunMode { Cep, Baseline };
enum class Normalization { None, Warm, Whole };

/// Everything needed to reproduce one run. Stored as flat `key = value`
/// text with `#` comments; see kManifestKeys for the recognized keys.
struct RunManifest {
  // data source: exactly one of `data` (CSV path) or `synthetic`
  // ("default" or a JSON spec path)
  std::string data;
  std::string column = "0";
  bool has_header = true;
  std::string synthetic;
  std::optional<std::uint64_t> synthetic_seed;
  Normalization normalization = Normalization::Warm;

  RunMode mode = RunMode::Cep;
  EngineConfig engine;
  std::string out;

  /// Parses manifest text; unknown keys and bad values are validation errors
  /// that name the key and line.
  static RunManifest parse(const std::string& text);
  static RunManifest load(const std::filesystem::path& path);

  /// Applies one `key = value` assignment (also used for CLI overrides).
  void set(const std::string& key, const std::string& value);

  /// Canonical text form: every key, fixed order.
  std::string serialize() const;
  std::map<std::string, std::string> to_map() const;

  /// 16 hex digits of FNV-1a over the canonical form, excluding `out`.
  std::string config_hash() const;

  /// Identity of the data and windowing (used to check comparability).
  std::string data_signature() const;

  void validate() const;

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

extern const std::vector<std::string> kManifestKeys;

struct LoadedSeries {
  SeriesSource source;
  std::vector<std::size_t> labels;  // synthetic sources only
  double norm_mean = 0.0;
  double norm_std = 1.0;
};

/// Loads (or generates) and normalizes the manifest's series.
LoadedSeries load_series(const RunManifest& manifest);

/// Runs the manifest's engine mode over an already loaded series.
RunResult execute(const RunManifest& manifest, const LoadedSeries& series);

}  // namespace driftpool
