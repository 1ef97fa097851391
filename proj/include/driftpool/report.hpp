#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "driftpool/engine.hpp"
#include "driftpool/manifest.hpp"

namespace driftpool {

/// Bumped on any breaking change to the results JSON layout.
inline constexpr int kResultsSchemaVersion = 1;

/// What the purity and plotting tools need back from a results file.
struct ResultsBundle {
  int schema_version = kResultsSchemaVersion;
  std::string config_hash;
  RunManifest manifest;
  std::size_t series_length = 0;
  RunResult result;
};

std::string bundle_to_json(const RunManifest& manifest, const LoadedSeries& series,
                           const RunResult& result);
ResultsBundle bundle_from_json(const std::string& text);
ResultsBundle read_bundle(const std::filesystem::path& path);

/// Writes results.json, instances.csv, genes.csv and events.csv into `dir`.
void write_bundle(const std::filesystem::path& dir, const RunManifest& manifest,
                  const LoadedSeries& series, const RunResult& result);

/// Percentage change of `value` relative to `baseline`, two decimals, e.g.
/// "-20.00%". Negative means lower MSE than the baseline.
std::string format_delta(double baseline, double value);

struct CompareRow {
  std::string name;
  std::string config_hash;
  double mean_mse = 0.0;
  std::string delta;  // vs the first row
};

std::vector<CompareRow> compare_rows(std::span<const std::string> names,
                                     std::span<const std::string> hashes,
                                     std::span<const RunSummary> summaries);
std::string format_compare_table(std::span<const CompareRow> rows);
void write_compare_csv(const std::filesystem::path& path, std::span<const CompareRow> rows);

struct EntryPurity {
  EntryId id;
  std::size_t served = 0;
  std::size_t majority_label = 0;
  std::size_t matching = 0;
};

struct PurityReport {
  double purity = 0.0;
  std::size_t scored = 0;
  std::size_t matching = 0;
  std::size_t excluded_mixed = 0;   // input window spans several concepts
  std::size_t excluded_safety = 0;  // within an evolved entry's safety period
  std::vector<EntryPurity> entries;
};

/// Assignment purity of a labeled run. An instance's label is the concept of
/// its input window; windows spanning a concept change are not scored. With
/// `exclude_safety`, the first `tau_safe` online selections of every evolved
/// entry are not scored either.
PurityReport compute_purity(std::span<const InstanceRecord> records,
                            std::span<const std::size_t> labels, std::size_t lookback,
                            const std::vector<PoolEvent>& events, std::size_t tau_safe,
                            bool exclude_safety);

std::string format_purity(const PurityReport& report);

}  // namespace driftpool
