// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <unistd.h>

#include <spdlog/spdlog.h>

#include "driftpool/commands.hpp"
#include "driftpool/data.hpp"
#include "driftpool/engine.hpp"
#include "driftpool/error.hpp"
#include "driftpool/gene.hpp"
#include "driftpool/pool.hpp"
#include "driftpool/rng.hpp"

using namespace driftpool;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

fs::path scratch_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("driftpool_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

double rel_err(double got, double want) {
  if (got == want) return 0.0;
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

// --- 1 -----------------------------------------------------------------
Outcome streaming_oracle() {
  Rng rng(101);
  double worst = 0.0;
  for (int c = 0; c < 100; ++c) {
    const auto n = static_cast<std::size_t>(1 + rng.uniform01() * 1000);
    const double offset = rng.uniform(-100.0, 100.0);
    const double scale = std::exp(rng.uniform(std::log(0.01), std::log(10.0)));
    std::vector<double> means(std::min<std::size_t>(n, 1000));
    for (double& m : means) m = offset + scale * rng.normal(0.0, 1.0);

    GeneVector g{means[0], 0.0};
    std::size_t count = 1;
    for (std::size_t i = 1; i < means.size(); ++i) {
      const auto u = global_update(g, count, {means[i], rng.uniform(0.0, 5.0)});
      g = u.gene;
      count = u.count;
    }
    // two-pass batch oracle
    double sum = 0.0;
    for (double m : means) sum += m;
    const double mean = sum / static_cast<double>(means.size());
    double ss = 0.0;
    for (double m : means) ss += (m - mean) * (m - mean);
    const double sd = std::sqrt(ss / static_cast<double>(means.size()));
    worst = std::max(worst, rel_err(g.mu, mean));
    if (means.size() == 1) {
      if (g.sigma != 0.0) worst = std::max(worst, 1.0);
    } else {
      worst = std::max(worst, rel_err(g.sigma, sd));
    }
    if (count != means.size()) return {false, fmt("count %zu after %zu values", count, means.size())};
  }
  return {worst < 1e-9, fmt("max relative error %.3g over 100 sequences", worst)};
}

// --- 2 -----------------------------------------------------------------
Outcome lr_restoration() {
  double worst = 0.0;
  bool early = false;
  for (double tau_lr : {0.1, 0.5, 0.9}) {
    for (std::size_t t_lr : {1u, 10u, 50u}) {
      CepConfig cfg;
      cfg.tau_lr = tau_lr;
      cfg.t_lr = t_lr;
      const double lr_raw = 0.01;
      Pool pool(std::make_unique<NaiveForecaster>(4, 2), GeneState::seeded({0.0, 1.0}), lr_raw, cfg);
      pool.at(0).n_pred = 100;
      const auto idx = pool.evolve(0, {10.0, 1.0}).index;
      PoolEntry& child = pool.at(idx);
      for (std::size_t k = 0; k < t_lr; ++k) {
        if (child.lr >= lr_raw) early = true;
        lr_tick(child, lr_raw, cfg);
      }
      worst = std::max(worst, rel_err(child.lr, lr_raw));
    }
  }
  return {worst < 1e-12 && !early,
          fmt("max relative error %.3g after t_lr ticks%s", worst, early ? "; restored too early" : "")};
}

// --- 3 -----------------------------------------------------------------
Outcome retrieval_equivalence() {
  Rng rng(303);
  std::size_t agree = 0, total = 0, ties = 0;
  for (RetrievalScore score : {RetrievalScore::Euclidean, RetrievalScore::Mle}) {
    for (int c = 0; c < 10000; ++c) {
      CepConfig cfg;
      cfg.retrieval = score;
      cfg.tau_gene = rng.uniform(0.0, 1.0);
      const auto k = static_cast<std::size_t>(1 + rng.uniform01() * 8);
      // coarse grid half the time so exact ties occur
      const bool grid = rng.uniform01() < 0.5;
      auto draw = [&](double lo, double hi) {
        const double v = rng.uniform(lo, hi);
        return grid ? std::round(v) : v;
      };
      Pool pool(std::make_unique<NaiveForecaster>(4, 2), GeneState::seeded({0.0, 1.0}), 0.01, cfg);
      for (std::size_t i = 1; i < k; ++i) pool.evolve(0, {0.0, 1.0});
      for (std::size_t i = 0; i < k; ++i) {
        GeneState& g = pool.at(i).genes;
        g.local = {draw(-5, 5), draw(0.5, 4)};
        g.global = grid && rng.uniform01() < 0.5 ? g.local : GeneVector{draw(-5, 5), draw(0.5, 4)};
      }
      const GeneVector sample{draw(-5, 5), draw(0.5, 4)};

      std::size_t best = 0;
      double best_score = 0.0;
      std::size_t n_best = 0;
      for (std::size_t i = 0; i < k; ++i) {
        const GeneState& g = pool.at(i).genes;
        const double mu = cfg.tau_gene * g.local.mu + (1.0 - cfg.tau_gene) * g.global.mu;
        const double sd = cfg.tau_gene * g.local.sigma + (1.0 - cfg.tau_gene) * g.global.sigma;
        double s;
        if (score == RetrievalScore::Euclidean) {
          s = std::sqrt((mu - sample.mu) * (mu - sample.mu) + (sd - sample.sigma) * (sd - sample.sigma));
        } else {
          const double v = std::max(sd, 1e-8);
          s = 2.0 * std::log(v) + (sample.sigma * sample.sigma) / (v * v) +
              (sample.mu - mu) * (sample.mu - mu) / (v * v);
        }
        if (i == 0 || s < best_score) {
          best = i;
          best_score = s;
          n_best = 1;
        } else if (s == best_score) {
          ++n_best;  // ids increase with position, so the first stays
        }
      }
      ties += n_best > 1;
      ++total;
      agree += pool.nearest(sample) == best;
    }
  }
  return {agree == total, fmt("%zu/%zu agree (%zu cases with tied minima)", agree, total, ties)};
}

// --- 4 -----------------------------------------------------------------
Outcome gradient_check() {
  Rng rng(404);
  double worst = 0.0;
  for (int c = 0; c < 100; ++c) {
    const auto L = static_cast<std::size_t>(2 + rng.uniform01() * 10);
    const auto H = static_cast<std::size_t>(1 + rng.uniform01() * 5);
    std::unique_ptr<Forecaster> f;
    if (c % 2 == 0) {
      f = std::make_unique<LinearForecaster>(L, H);
    } else {
      f = std::make_unique<MlpForecaster>(L, H, static_cast<std::size_t>(2 + rng.uniform01() * 7),
                                          static_cast<std::uint64_t>(c));
    }
    auto p = f->parameters();
    for (double& v : p) v = rng.uniform(-0.5, 0.5);
    f->set_parameters(p);
    std::vector<double> x(L), y(H);
    for (double& v : x) v = rng.normal(0.0, 1.0);
    for (double& v : y) v = rng.normal(0.0, 1.0);

    const auto g = f->gradient(x, y);
    const double h = 1e-6;
    for (std::size_t i = 0; i < p.size(); ++i) {
      auto q = p;
      q[i] = p[i] + h;
      f->set_parameters(q);
      const double up = mse(f->predict(x), y);
      q[i] = p[i] - h;
      f->set_parameters(q);
      const double down = mse(f->predict(x), y);
      const double fd = (up - down) / (2.0 * h);
      const double denom = std::max({std::abs(fd), std::abs(g[i]), 1e-6});
      worst = std::max(worst, std::abs(fd - g[i]) / denom);
    }
    f->set_parameters(p);
  }
  return {worst < 1e-4, fmt("max relative error %.3g over 100 linear/mlp cases", worst)};
}

// --- 5 -----------------------------------------------------------------
Outcome three_sigma() {
  EngineConfig cfg;  // linear, L=60, H=30, defaults
  std::size_t quiet = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(1000 + seed);
    std::vector<double> s(6000);
    for (double& v : s) v = rng.normal(0.0, 1.0);
    cfg.seed = seed;
    quiet += run(s, cfg).summary.total_evolutions == 0;
  }

  // level staircase 0 -> 10 -> 20 -> 30 with unit noise
  const std::vector<std::size_t> lengths = {4000, 3000, 3000, 2000};
  std::vector<double> s;
  std::vector<std::size_t> changes;
  Rng rng(55);
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    if (k > 0) changes.push_back(s.size());
    for (std::size_t i = 0; i < lengths[k]; ++i) s.push_back(10.0 * static_cast<double>(k) + rng.normal(0.0, 1.0));
  }
  EngineConfig stair;
  stair.forecaster = ForecasterKind::Naive;
  const RunResult r = run(s, stair);
  std::size_t matched = 0;
  for (std::size_t c : changes) {
    std::size_t first = r.records.size();
    for (std::size_t k = 0; k < r.records.size(); ++k) {
      if (r.records[k].t + stair.lookback > c) {
        first = k;
        break;
      }
    }
    std::size_t fired = 0;
    for (std::size_t k = first; k < std::min(first + 4, r.records.size()); ++k) fired += r.records[k].evolved;
    matched += fired == 1;
  }
  const bool pass = quiet >= 19 && matched == changes.size() &&
                    r.summary.total_evolutions == changes.size();
  return {pass, fmt("stationary: %zu/20 seeds without evolution; staircase: %zu/%zu changes "
                    "with exactly one evolution within 3 instances, %zu evolutions in total",
                    quiet, matched, changes.size(), r.summary.total_evolutions)};
}

// --- 6 -----------------------------------------------------------------
constexpr double kRecurrenceGap = 0.10;

Outcome recurrence_benefit() {
  RunManifest m;
  m.synthetic = "default";
  const LoadedSeries series = load_series(m);
  const RunResult cep = execute(m, series);
  RunManifest mb = m;
  mb.mode = RunMode::Baseline;
  const RunResult base = execute(mb, series);

  const double gap = 1.0 - cep.summary.mean_mse / base.summary.mean_mse;

  // online A segments of the default schedule: [6000, 9000) and [15000, 18000)
  const std::size_t L = m.engine.lookback, H = m.engine.horizon;
  auto pure_in = [&](const InstanceRecord& r, std::size_t lo, std::size_t hi) {
    return r.t >= lo && r.t + L + H <= hi;
  };
  auto steady = [&](const RunResult& res) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : res.records) {
      if (pure_in(r, 7500, 9000)) {
        sum += r.mse;
        ++n;
      }
    }
    return sum / static_cast<double>(n);
  };
  auto onset_peak = [&](const RunResult& res) {
    double peak = 0.0;
    std::size_t n = 0;
    for (const auto& r : res.records) {
      if (pure_in(r, 15000, 18000) && n < 10) {
        peak = std::max(peak, r.mse);
        ++n;
      }
    }
    return peak;
  };
  const double cep_ratio = onset_peak(cep) / steady(cep);
  const double base_ratio = onset_peak(base) / steady(base);
  const bool pass = gap >= kRecurrenceGap && cep_ratio <= 2.0 && base_ratio > 5.0;
  return {pass, fmt("mean MSE %.5f vs baseline %.5f (%.2f%% lower, need >= %.0f%%); second-A onset "
                    "peak / first-A steady state: pool %.2fx (need <= 2), baseline %.2fx (need > 5)",
                    cep.summary.mean_mse, base.summary.mean_mse, 100.0 * gap,
                    100.0 * kRecurrenceGap, cep_ratio, base_ratio)};
}

// --- 7 -----------------------------------------------------------------
double purity_for(const SyntheticSpec& spec, const std::string& tag) {
  const fs::path dir = scratch_dir() / tag;
  fs::create_directories(dir);
  std::ofstream(dir / "spec.json") << spec.to_json();
  const auto gen = cmd_generate(spec, std::nullopt, dir / "values.csv");
  RunManifest m;
  m.synthetic = (dir / "spec.json").string();
  m.out = (dir / "bundle").string();
  cmd_run(m);
  return cmd_purity(dir / "bundle" / "results.json", gen.labels_path, false).purity;
}

Outcome identification_purity() {
  SyntheticSpec clean = SyntheticSpec::default_acceptance();
  for (auto& c : clean.concepts) c.noise_sigma = 0.0;
  const double p_clean = purity_for(clean, "clean");
  double p_min = 1.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SyntheticSpec noisy = SyntheticSpec::default_acceptance();
    noisy.seed = seed;
    p_min = std::min(p_min, purity_for(noisy, "noisy" + std::to_string(seed)));
  }
  return {p_clean == 1.0 && p_min >= 0.9,
          fmt("noise-free purity %.4f (need 1); noisy minimum over 10 seeds %.4f (need >= 0.9)",
              p_clean, p_min)};
}

// --- 8 -----------------------------------------------------------------
Outcome elimination_behavior() {
  SyntheticSpec spec = SyntheticSpec::default_acceptance();
  const std::size_t transient = spec.concepts.size();
  spec.concepts.push_back({24.0, 1.0, 24, 0.25});
  // A B A [transient] C B A
  spec.schedule.insert(spec.schedule.begin() + 3, Segment{transient, 600});

  std::map<std::size_t, std::size_t> appearances;
  for (const auto& s : spec.schedule) ++appearances[s.concept_index];
  std::size_t recurring = 0;
  for (const auto& [c, n] : appearances) recurring += n > 1;

  const fs::path dir = scratch_dir() / "transient";
  fs::create_directories(dir);
  std::ofstream(dir / "spec.json") << spec.to_json();
  RunManifest m;
  m.synthetic = (dir / "spec.json").string();
  const LoadedSeries series = load_series(m);
  const RunResult r = execute(m, series);

  // entry that served the transient segment
  std::map<std::uint64_t, std::size_t> served;
  for (const auto& rec : r.records) {
    const std::size_t label = series.labels[rec.t];
    if (label == transient && series.labels[rec.t + m.engine.lookback - 1] == transient) {
      ++served[rec.selected.value];
    }
  }
  if (served.empty()) return {false, "no instance was served inside the transient segment"};
  const auto owner = std::max_element(served.begin(), served.end(),
                                      [](auto& a, auto& b) { return a.second < b.second; })->first;
  std::size_t last = 0, n_pred = 0, elim = r.records.size();
  for (std::size_t k = 0; k < r.records.size(); ++k) {
    if (r.records[k].selected.value == owner) {
      last = k;
      ++n_pred;
    }
    for (EntryId id : r.records[k].eliminated) {
      if (id.value == owner && elim == r.records.size()) elim = k;
    }
  }
  const bool created_online = std::any_of(r.events.begin(), r.events.end(), [&](const PoolEvent& e) {
    return e.kind == PoolEventKind::Created && e.id.value == owner && e.parent.has_value();
  });
  const double bound = m.engine.cep.tau_e * static_cast<double>(n_pred) + 1.0;
  const bool eliminated = elim < r.records.size();
  const double delay = eliminated ? static_cast<double>(elim - last) : -1.0;
  const bool pass = created_online && eliminated && delay <= bound &&
                    r.summary.final_pool_size == recurring;
  return {pass, fmt("transient entry %llu: %zu selections, eliminated %s%.0f instances after its last "
                    "selection (bound %.1f); final pool %zu, recurring concepts %zu",
                    static_cast<unsigned long long>(owner), n_pred, eliminated ? "" : "never; ",
                    delay, bound, r.summary.final_pool_size, recurring)};
}

// --- 9 -----------------------------------------------------------------
Outcome ablation_identity() {
  RunManifest m;
  m.synthetic = "default";
  const LoadedSeries series = load_series(m);
  std::size_t same = 0, cases = 0;
  for (ForecasterKind kind : {ForecasterKind::Naive, ForecasterKind::Linear, ForecasterKind::Mlp}) {
    EngineConfig cfg = m.engine;
    cfg.forecaster = kind;
    cfg.record_forecasts = true;
    cfg.cep.evolution = false;
    ++cases;
    same += run(series.source.values, cfg) == run_baseline(series.source.values, cfg);
  }
  return {same == cases, fmt("%zu/%zu forecaster kinds bit-identical to the bare run", same, cases)};
}

// --- 10 ----------------------------------------------------------------
Outcome gradient_abandonment() {
  const std::size_t L = 60, H = 30;
  CepConfig cfg;
  Rng rng(1010);
  std::vector<double> series(L + H);
  for (std::size_t i = 0; i < L; ++i) series[i] = rng.normal(0.0, 1.0);
  for (std::size_t i = L; i < L + H; ++i) series[i] = 10.0 + rng.normal(0.0, 1.0);

  auto f = std::make_unique<LinearForecaster>(L, H);
  auto p = f->parameters();
  for (double& v : p) v = rng.uniform(-0.1, 0.1);
  f->set_parameters(p);
  Pool pool(std::move(f), GeneState::seeded({0.0, 1.0}), 0.01, cfg);
  pool.at(0).n_pred = 100;
  const auto checksum = pool.at(0).forecaster->parameter_checksum();
  const GeneState genes = pool.at(0).genes;

  const Instance inst{std::span<const double>(series).first(L), std::span<const double>(series).subspan(L), 0};
  const InstanceRecord rec = online_step(pool, inst, StepOptions{L});
  const bool unchanged = pool.at(0).forecaster->parameter_checksum() == checksum && pool.at(0).genes == genes;
  return {rec.abandoned && !rec.evolved && unchanged && pool.size() == 1,
          fmt("abandoned=%d, parameters and genes %s", rec.abandoned ? 1 : 0,
              unchanged ? "unchanged" : "CHANGED")};
}

// --- 11 ----------------------------------------------------------------
Outcome determinism() {
  const fs::path dir = scratch_dir() / "determinism";
  fs::create_directories(dir);
  RunManifest m;
  m.synthetic = "default";
  m.engine.forecaster = ForecasterKind::Mlp;
  {
    std::ofstream(dir / "run.manifest") << m.serialize();
  }
  const RunOutput a = cmd_run(RunManifest::load(dir / "run.manifest"));
  const RunOutput b = cmd_run(RunManifest::load(dir / "run.manifest"));
  RunManifest lin = RunManifest::load(dir / "run.manifest");
  lin.engine.forecaster = ForecasterKind::Linear;
  const RunOutput c = cmd_run(lin);
  const RunOutput d = cmd_run(lin);
  const bool pass = a.config_hash == b.config_hash && a.result.summary.mean_mse == b.result.summary.mean_mse &&
                    a.result.events == b.result.events && a.result == b.result &&
                    c.config_hash == d.config_hash && c.result == d.result &&
                    a.config_hash != c.config_hash;
  return {pass, fmt("mlp hash %s mse %.10g / %.10g; linear hash %s mse %.10g / %.10g",
                    a.config_hash.c_str(), a.result.summary.mean_mse, b.result.summary.mean_mse,
                    c.config_hash.c_str(), c.result.summary.mean_mse, d.result.summary.mean_mse)};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::warn);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"streaming statistics oracle", streaming_oracle},
      {"learning-rate restoration", lr_restoration},
      {"retrieval brute-force equivalence", retrieval_equivalence},
      {"gradient check", gradient_check},
      {"three-sigma evolution behavior", three_sigma},
      {"recurrence benefit", recurrence_benefit},
      {"identification purity", identification_purity},
      {"elimination behavior", elimination_behavior},
      {"ablation identity", ablation_identity},
      {"gradient abandonment", gradient_abandonment},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::error_code ec;
  fs::remove_all(scratch_dir(), ec);
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
