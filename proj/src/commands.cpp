#include "driftpool/commands.hpp"

#include <cmath>
#include <cstdio>
#include <future>
#include <map>
#include <sstream>

#include <spdlog/spdlog.h>

#include "driftpool/error.hpp"

namespace driftpool {

RunOutput cmd_run(const RunManifest& manifest) {
  manifest.validate();
  RunOutput out;
  out.config_hash = manifest.config_hash();
  out.series = load_series(manifest);
  spdlog::debug("run {}: {} points", out.config_hash, out.series.source.values.size());
  out.result = execute(manifest, out.series);
  spdlog::info("run {}: mean mse {:.6f} over {} instances, pool {}, {} evolutions, {} eliminations",
               out.config_hash, out.result.summary.mean_mse, out.result.summary.instances,
               out.result.summary.final_pool_size, out.result.summary.total_evolutions,
               out.result.summary.total_eliminations);
  if (!manifest.out.empty()) write_bundle(manifest.out, manifest, out.series, out.result);
  return out;
}

CompareOutput cmd_compare(std::span<const RunManifest> manifests,
                          std::span<const std::string> names,
                          const std::filesystem::path& csv_out) {
  if (manifests.size() < 2) {
    throw Error(ErrorKind::Validation, "compare needs at least two manifests");
  }
  if (names.size() != manifests.size()) throw Error(ErrorKind::State, "compare: one name per manifest");
  for (std::size_t i = 0; i < manifests.size(); ++i) {
    manifests[i].validate();
    if (manifests[i].data_signature() != manifests[0].data_signature()) {
      throw Error(ErrorKind::Validation,
                  "compare: '" + names[i] + "' uses different data or windowing than '" +
                      names[0] + "' (" + manifests[i].data_signature() + " vs " +
                      manifests[0].data_signature() + ")");
    }
  }

  // runs share nothing; results are collected in manifest order
  std::vector<std::future<RunOutput>> jobs;
  for (const auto& m : manifests) {
    jobs.push_back(std::async(std::launch::async, [&m] { return cmd_run(m); }));
  }
  std::vector<std::string> hashes;
  std::vector<RunSummary> summaries;
  for (auto& job : jobs) {
    RunOutput r = job.get();
    hashes.push_back(r.config_hash);
    summaries.push_back(r.result.summary);
  }

  CompareOutput out;
  out.rows = compare_rows(names, hashes, summaries);
  out.table = format_compare_table(out.rows);
  if (!csv_out.empty()) write_compare_csv(csv_out, out.rows);
  return out;
}

std::filesystem::path default_labels_path(const std::filesystem::path& values) {
  auto p = values;
  p.replace_filename(values.stem().string() + "_labels.csv");
  return p;
}

GenerateOutput cmd_generate(SyntheticSpec spec, std::optional<std::uint64_t> seed,
                            const std::filesystem::path& out,
                            const std::filesystem::path& labels_out) {
  if (seed) spec.seed = *seed;
  spec.validate();
  const LabeledStream stream = generate(spec);

  GenerateOutput res;
  res.values_path = out;
  res.labels_path = labels_out.empty() ? default_labels_path(out) : labels_out;
  {
    const std::vector<std::string> header = {"value"};
    const std::vector<std::vector<double>> cols = {stream.values};
    write_csv(res.values_path, header, cols);
  }
  {
    std::vector<double> labels(stream.labels.begin(), stream.labels.end());
    const std::vector<std::string> header = {"label"};
    const std::vector<std::vector<double>> cols = {labels};
    write_csv(res.labels_path, header, cols);
  }

  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu points, %zu segments, %zu concepts, seed %llu\n",
                stream.values.size(), spec.schedule.size(), spec.concepts.size(),
                static_cast<unsigned long long>(spec.seed));
  os << buf;
  std::size_t start = 0;
  for (std::size_t s = 0; s < spec.schedule.size(); ++s) {
    const auto& seg = spec.schedule[s];
    std::snprintf(buf, sizeof buf, "  segment %zu: concept %zu, [%zu, %zu)\n", s, seg.concept_index,
                  start, start + seg.duration);
    os << buf;
    start += seg.duration;
  }
  struct Moments {
    std::size_t n = 0;
    double sum = 0.0, sq = 0.0;
  };
  std::map<std::size_t, Moments> per;
  for (std::size_t i = 0; i < stream.values.size(); ++i) {
    auto& m = per[stream.labels[i]];
    ++m.n;
    m.sum += stream.values[i];
  }
  for (std::size_t i = 0; i < stream.values.size(); ++i) {
    auto& m = per[stream.labels[i]];
    const double d = stream.values[i] - m.sum / static_cast<double>(m.n);
    m.sq += d * d;
  }
  for (const auto& [label, m] : per) {
    const double n = static_cast<double>(m.n);
    std::snprintf(buf, sizeof buf, "  concept %zu: %zu points, mean %.4f, std %.4f\n", label, m.n,
                  m.sum / n, std::sqrt(m.sq / n));
    os << buf;
  }
  res.summary = os.str();
  return res;
}

PurityReport cmd_purity(const std::filesystem::path& bundle_path,
                        const std::filesystem::path& labels_csv, bool exclude_safety) {
  const ResultsBundle bundle = read_bundle(bundle_path);
  const SeriesSource src = load_csv(labels_csv, "0", true);
  if (src.values.size() != bundle.series_length) {
    throw Error(ErrorKind::Validation,
                "purity: labels file has " + std::to_string(src.values.size()) +
                    " rows but the run covered " + std::to_string(bundle.series_length) + " points");
  }
  std::vector<std::size_t> labels;
  labels.reserve(src.values.size());
  for (std::size_t i = 0; i < src.values.size(); ++i) {
    const double v = src.values[i];
    if (v < 0.0 || v != std::floor(v)) {
      throw Error(ErrorKind::Parse, "purity: label row " + std::to_string(i + 2) +
                                        " is not a non-negative integer");
    }
    labels.push_back(static_cast<std::size_t>(v));
  }
  return compute_purity(bundle.result.records, labels, bundle.manifest.engine.lookback,
                        bundle.result.events, bundle.manifest.engine.cep.tau_safe, exclude_safety);
}

}  // namespace driftpool
