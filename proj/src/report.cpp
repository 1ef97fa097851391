#include "driftpool/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "driftpool/data.hpp"
#include "driftpool/error.hpp"

namespace driftpool {

using json = nlohmann::ordered_json;

namespace {

const char* event_name(PoolEventKind kind) {
  switch (kind) {
    case PoolEventKind::Created: return "created";
    case PoolEventKind::Eliminated: return "eliminated";
    case PoolEventKind::Evicted: return "evicted";
  }
  return "created";
}

PoolEventKind parse_event(const std::string& s) {
  if (s == "created") return PoolEventKind::Created;
  if (s == "eliminated") return PoolEventKind::Eliminated;
  if (s == "evicted") return PoolEventKind::Evicted;
  throw Error(ErrorKind::Parse, "results: unknown event kind '" + s + "'");
}

}  // namespace

std::string bundle_to_json(const RunManifest& manifest, const LoadedSeries& series,
                           const RunResult& result) {
  json j;
  j["schema_version"] = kResultsSchemaVersion;
  j["config_hash"] = manifest.config_hash();
  json m = json::object();
  const auto map = manifest.to_map();
  for (const auto& key : kManifestKeys) m[key] = map.at(key);
  j["manifest"] = m;
  j["series"] = {{"name", series.source.name},
                 {"length", series.source.values.size()},
                 {"norm_mean", series.norm_mean},
                 {"norm_std", series.norm_std}};
  const RunSummary& s = result.summary;
  j["summary"] = {{"mean_mse", s.mean_mse},
                  {"instances", s.instances},
                  {"final_pool_size", s.final_pool_size},
                  {"total_evolutions", s.total_evolutions},
                  {"total_eliminations", s.total_eliminations}};

  json records = json::array();
  for (const auto& r : result.records) {
    json rec = {{"t", r.t},
                {"entry", r.selected.value},
                {"mse", r.mse},
                {"evolved", r.evolved},
                {"abandoned", r.abandoned}};
    json elim = json::array();
    for (EntryId id : r.eliminated) elim.push_back(id.value);
    rec["eliminated"] = elim;
    rec["pool_size"] = r.pool_size;
    if (!r.forecast.empty()) rec["forecast"] = r.forecast;
    if (!r.genes.empty()) {
      json genes = json::array();
      for (const auto& g : r.genes) genes.push_back({g.id.value, g.gene.mu, g.gene.sigma});
      rec["genes"] = genes;
    }
    records.push_back(std::move(rec));
  }
  j["records"] = std::move(records);

  json events = json::array();
  for (const auto& e : result.events) {
    json ev = {{"kind", event_name(e.kind)}, {"entry", e.id.value}, {"t", e.t}};
    ev["parent"] = e.parent ? json(e.parent->value) : json(nullptr);
    events.push_back(std::move(ev));
  }
  j["events"] = std::move(events);
  return j.dump(1);
}

ResultsBundle bundle_from_json(const std::string& text) {
  ResultsBundle b;
  try {
    const json j = json::parse(text);
    b.schema_version = j.at("schema_version").get<int>();
    if (b.schema_version != kResultsSchemaVersion) {
      throw Error(ErrorKind::Parse, "results: unsupported schema version " +
                                        std::to_string(b.schema_version));
    }
    b.config_hash = j.at("config_hash").get<std::string>();
    for (const auto& [key, value] : j.at("manifest").items()) {
      b.manifest.set(key, value.get<std::string>());
    }
    b.series_length = j.at("series").at("length").get<std::size_t>();
    const auto& s = j.at("summary");
    b.result.summary = {s.at("mean_mse").get<double>(), s.at("instances").get<std::size_t>(),
                        s.at("final_pool_size").get<std::size_t>(),
                        s.at("total_evolutions").get<std::size_t>(),
                        s.at("total_eliminations").get<std::size_t>()};
    for (const auto& r : j.at("records")) {
      InstanceRecord rec;
      rec.t = r.at("t").get<std::size_t>();
      rec.selected = EntryId{r.at("entry").get<std::uint64_t>()};
      rec.mse = r.at("mse").get<double>();
      rec.evolved = r.at("evolved").get<bool>();
      rec.abandoned = r.at("abandoned").get<bool>();
      for (const auto& id : r.at("eliminated")) rec.eliminated.push_back(EntryId{id.get<std::uint64_t>()});
      rec.pool_size = r.at("pool_size").get<std::size_t>();
      if (r.contains("forecast")) rec.forecast = r.at("forecast").get<std::vector<double>>();
      if (r.contains("genes")) {
        for (const auto& g : r.at("genes")) {
          rec.genes.push_back({EntryId{g.at(0).get<std::uint64_t>()},
                               {g.at(1).get<double>(), g.at(2).get<double>()}});
        }
      }
      b.result.records.push_back(std::move(rec));
    }
    for (const auto& e : j.at("events")) {
      PoolEvent ev;
      ev.kind = parse_event(e.at("kind").get<std::string>());
      ev.id = EntryId{e.at("entry").get<std::uint64_t>()};
      ev.t = e.at("t").get<std::size_t>();
      if (!e.at("parent").is_null()) ev.parent = EntryId{e.at("parent").get<std::uint64_t>()};
      b.result.events.push_back(ev);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("results: ") + e.what());
  }
  return b;
}

ResultsBundle read_bundle(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open results '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return bundle_from_json(ss.str());
}

void write_bundle(const std::filesystem::path& dir, const RunManifest& manifest,
                  const LoadedSeries& series, const RunResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::Io, "cannot create output directory '" + dir.string() + "'");
  {
    std::ofstream out(dir / "results.json", std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write results.json in '" + dir.string() + "'");
    out << bundle_to_json(manifest, series, result) << '\n';
  }

  std::vector<double> t, entry, err, evolved, abandoned, pool;
  std::vector<double> gt, gid, gmu, gsigma;
  for (const auto& r : result.records) {
    t.push_back(static_cast<double>(r.t));
    entry.push_back(static_cast<double>(r.selected.value));
    err.push_back(r.mse);
    evolved.push_back(r.evolved ? 1.0 : 0.0);
    abandoned.push_back(r.abandoned ? 1.0 : 0.0);
    pool.push_back(static_cast<double>(r.pool_size));
    for (const auto& g : r.genes) {
      gt.push_back(static_cast<double>(r.t));
      gid.push_back(static_cast<double>(g.id.value));
      gmu.push_back(g.gene.mu);
      gsigma.push_back(g.gene.sigma);
    }
  }
  const std::vector<std::string> inst_header = {"t", "entry_id", "mse", "evolved", "abandoned", "pool_size"};
  const std::vector<std::vector<double>> inst_cols = {t, entry, err, evolved, abandoned, pool};
  write_csv(dir / "instances.csv", inst_header, inst_cols);

  const std::vector<std::string> gene_header = {"t", "entry_id", "mu", "sigma"};
  const std::vector<std::vector<double>> gene_cols = {gt, gid, gmu, gsigma};
  write_csv(dir / "genes.csv", gene_header, gene_cols);

  // kind: 0 created, 1 eliminated, 2 evicted; parent_id -1 when absent
  std::vector<double> et, eid, eparent, ekind;
  for (const auto& e : result.events) {
    et.push_back(static_cast<double>(e.t));
    eid.push_back(static_cast<double>(e.id.value));
    eparent.push_back(e.parent ? static_cast<double>(e.parent->value) : -1.0);
    ekind.push_back(static_cast<double>(static_cast<int>(e.kind)));
  }
  const std::vector<std::string> ev_header = {"t", "entry_id", "parent_id", "kind"};
  const std::vector<std::vector<double>> ev_cols = {et, eid, eparent, ekind};
  write_csv(dir / "events.csv", ev_header, ev_cols);
}

std::string format_delta(double baseline, double value) {
  if (!(baseline > 0.0)) return "n/a";
  double pct = (value - baseline) / baseline * 100.0;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", pct);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s + "%";
}

std::vector<CompareRow> compare_rows(std::span<const std::string> names,
                                     std::span<const std::string> hashes,
                                     std::span<const RunSummary> summaries) {
  if (names.size() != summaries.size() || hashes.size() != summaries.size()) {
    throw Error(ErrorKind::State, "compare: mismatched inputs");
  }
  std::vector<CompareRow> rows;
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    rows.push_back({names[i], hashes[i], summaries[i].mean_mse,
                    format_delta(summaries.front().mean_mse, summaries[i].mean_mse)});
  }
  return rows;
}

std::string format_compare_table(std::span<const CompareRow> rows) {
  std::size_t width = 8;
  for (const auto& r : rows) width = std::max(width, r.name.size());
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s  %-16s  %12s  %10s\n", static_cast<int>(width), "manifest",
                "config_hash", "mean_mse", "delta");
  os << buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-*s  %-16s  %12.6f  %10s\n", static_cast<int>(width),
                  r.name.c_str(), r.config_hash.c_str(), r.mean_mse, r.delta.c_str());
    os << buf;
  }
  return os.str();
}

void write_compare_csv(const std::filesystem::path& path, std::span<const CompareRow> rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << "index,name,config_hash,mean_mse,delta_pct\n";
  char buf[64];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", rows[i].mean_mse);
    std::string delta = rows[i].delta;
    if (!delta.empty() && delta.back() == '%') delta.pop_back();
    out << i << ',' << rows[i].name << ',' << rows[i].config_hash << ',' << buf << ',' << delta << '\n';
  }
}

PurityReport compute_purity(std::span<const InstanceRecord> records,
                            std::span<const std::size_t> labels, std::size_t lookback,
                            const std::vector<PoolEvent>& events, std::size_t tau_safe,
                            bool exclude_safety) {
  std::map<std::uint64_t, bool> evolved_entry;
  for (const auto& e : events) {
    if (e.kind == PoolEventKind::Created) evolved_entry[e.id.value] = e.parent.has_value();
  }

  struct Scored {
    std::uint64_t entry;
    std::size_t label;
  };
  PurityReport report;
  std::vector<Scored> scored;
  std::map<std::uint64_t, std::size_t> selections;
  for (const auto& r : records) {
    if (r.t + lookback > labels.size()) {
      throw Error(ErrorKind::Validation,
                  "purity: labels (" + std::to_string(labels.size()) +
                      " points) do not cover the instance at t=" + std::to_string(r.t));
    }
    const std::size_t seen = selections[r.selected.value]++;
    const auto window = labels.subspan(r.t, lookback);
    if (std::any_of(window.begin(), window.end(), [&](std::size_t l) { return l != window.front(); })) {
      ++report.excluded_mixed;
      continue;
    }
    if (exclude_safety && evolved_entry[r.selected.value] && seen < tau_safe) {
      ++report.excluded_safety;
      continue;
    }
    scored.push_back({r.selected.value, window.front()});
  }

  std::map<std::uint64_t, std::map<std::size_t, std::size_t>> counts;
  for (const auto& s : scored) ++counts[s.entry][s.label];
  for (const auto& [entry, by_label] : counts) {
    EntryPurity ep;
    ep.id = EntryId{entry};
    std::size_t best = 0;
    for (const auto& [label, n] : by_label) {
      ep.served += n;
      if (n > best) {  // std::map order keeps the smallest label on ties
        best = n;
        ep.majority_label = label;
      }
    }
    ep.matching = best;
    report.matching += best;
    report.entries.push_back(ep);
  }
  report.scored = scored.size();
  report.purity = report.scored ? static_cast<double>(report.matching) / static_cast<double>(report.scored) : 1.0;
  return report;
}

std::string format_purity(const PurityReport& report) {
  std::ostringstream os;
  char buf[160];
  std::snprintf(buf, sizeof buf, "purity %.6f (%zu of %zu scored instances; %zu mixed-window and %zu safety-period instances excluded)\n",
                report.purity, report.matching, report.scored, report.excluded_mixed,
                report.excluded_safety);
  os << buf;
  for (const auto& e : report.entries) {
    std::snprintf(buf, sizeof buf, "  entry %llu: served %zu, majority concept %zu, matching %zu\n",
                  static_cast<unsigned long long>(e.id.value), e.served, e.majority_label, e.matching);
    os << buf;
  }
  return os.str();
}

}  // namespace driftpool
