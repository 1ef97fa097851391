#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "driftpool/data.hpp"
#include "driftpool/manifest.hpp"
#include "driftpool/report.hpp"

namespace driftpool {

struct RunOutput {
  std::string config_hash;
  LoadedSeries series;
  RunResult result;
};

/// Validates the manifest, runs it and, when `manifest.out` is set, writes the
/// results bundle there.
RunOutput cmd_run(const RunManifest& manifest);

struct CompareOutput {
  std::vector<CompareRow> rows;
  std::string table;
};

/// Runs every manifest (in parallel) and tabulates mean MSE against the first.
/// All manifests must share data, column, normalization, lookback and horizon.
CompareOutput cmd_compare(std::span<const RunManifest> manifests,
                          std::span<const std::string> names,
                          const std::filesystem::path& csv_out = {});

struct GenerateOutput {
  std::filesystem::path values_path;
  std::filesystem::path labels_path;
  std::string summary;
};

/// Labels go next to the values as `<stem>_labels.csv` unless a path is given.
GenerateOutput cmd_generate(SyntheticSpec spec, std::optional<std::uint64_t> seed,
                            const std::filesystem::path& out,
                            const std::filesystem::path& labels_out = {});

std::filesystem::path default_labels_path(const std::filesystem::path& values);

PurityReport cmd_purity(const std::filesystem::path& bundle,
                        const std::filesystem::path& labels_csv, bool exclude_safety);

}  // namespace driftpool
