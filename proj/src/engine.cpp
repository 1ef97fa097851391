#include "driftpool/engine.hpp"

#include <cmath>
#include <string>

#include "driftpool/data.hpp"
#include "driftpool/error.hpp"

namespace driftpool {

double EngineConfig::learning_rate() const noexcept {
  if (lr) return *lr;
  return forecaster == ForecasterKind::Mlp ? 0.003 : 0.01;
}

void EngineConfig::validate() const {
  if (lookback < 1) throw Error(ErrorKind::Validation, "lookback must be >= 1");
  if (horizon < 1) throw Error(ErrorKind::Validation, "horizon must be >= 1");
  if (forecaster == ForecasterKind::Mlp && hidden < 1) {
    throw Error(ErrorKind::Validation, "hidden must be >= 1");
  }
  const double rate = learning_rate();
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw Error(ErrorKind::Validation, "lr must be finite and > 0");
  }
  cep.validate();
}

std::vector<Instance> warm_instances(std::span<const double> series, std::size_t lookback,
                                     std::size_t horizon) {
  const auto warm = series.first(warm_length(series.size()));
  std::vector<Instance> out;
  const std::size_t span = lookback + horizon;
  for (std::size_t t = 0; t + span <= warm.size(); ++t) {
    out.push_back({warm.subspan(t, lookback), warm.subspan(t + lookback, horizon), t});
  }
  return out;
}

std::vector<Instance> online_instances(std::span<const double> series, std::size_t lookback,
                                       std::size_t horizon) {
  const std::size_t start = warm_length(series.size());
  std::vector<Instance> out;
  const std::size_t span = lookback + horizon;
  for (std::size_t t = start; t + span <= series.size(); t += horizon) {
    out.push_back({series.subspan(t, lookback), series.subspan(t + lookback, horizon), t});
  }
  return out;
}

std::size_t minimum_series_length(std::size_t lookback, std::size_t horizon) {
  const std::size_t span = lookback + horizon;
  std::size_t n = span;
  while (warm_length(n) < span || n - warm_length(n) < span) ++n;
  return n;
}

Pool make_pool(const EngineConfig& config, GeneVector seed_gene) {
  config.validate();
  return Pool(make_forecaster(config.forecaster, config.lookback, config.horizon, config.hidden,
                              config.seed),
              GeneState::seeded(seed_gene), config.learning_rate(), config.cep);
}

void warm_up(Pool& pool, std::span<const Instance> warm, std::size_t epochs, double lr,
             std::size_t scope) {
  if (pool.size() != 1) throw Error(ErrorKind::State, "warm-up requires a single-entry pool");
  PoolEntry& entry = pool.at(0);
  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    for (const Instance& inst : warm) {
      const GeneVector gx = compute_gene(inst.x, scope);
      entry.forecaster->train_step(inst.x, inst.y, lr);
      absorb_instance(entry, gx, pool.config());
      ++entry.n_pred;
    }
  }
}

InstanceRecord online_step(Pool& pool, const Instance& instance, const StepOptions& options,
                           std::vector<PoolEvent>* events) {
  const CepConfig& cfg = pool.config();
  InstanceRecord rec;
  rec.t = instance.t;

  const GeneVector gx = compute_gene(instance.x, options.scope);
  std::size_t current = pool.nearest(gx);
  if (should_evolve(pool.at(current), gx, cfg)) {
    const EntryId parent = pool.at(current).id;
    auto evolved = pool.evolve(current, gx);
    current = evolved.index;
    rec.evolved = true;
    rec.eliminated = evolved.evicted;
    if (events) {
      events->push_back({PoolEventKind::Created, pool.at(current).id, parent, instance.t});
      for (EntryId id : evolved.evicted) {
        events->push_back({PoolEventKind::Evicted, id, std::nullopt, instance.t});
      }
    }
  }

  PoolEntry& entry = pool.at(current);
  rec.selected = entry.id;
  auto forecast = entry.forecaster->predict(instance.x);
  for (double v : forecast) {
    if (!std::isfinite(v)) throw Error(ErrorKind::Numeric, "non-finite forecast at t=" + std::to_string(instance.t));
  }
  rec.mse = mse(forecast, instance.y);
  if (options.record_forecast) rec.forecast = std::move(forecast);

  const GeneVector gy = compute_gene(instance.y, options.scope);
  rec.abandoned = cfg.gradient_abandonment && should_evolve(entry, gy, cfg);
  if (!rec.abandoned) {
    const double lr = entry.lr;
    entry.forecaster->train_step(instance.x, instance.y, lr);
    lr_tick(entry, pool.lr_raw(), cfg);
    absorb_instance(entry, gx, cfg);
  }

  pool.mark_selected(current);
  const EntryId selected = entry.id;
  for (EntryId id : pool.eliminate_stale(selected)) {
    rec.eliminated.push_back(id);
    if (events) events->push_back({PoolEventKind::Eliminated, id, std::nullopt, instance.t});
  }
  rec.pool_size = pool.size();
  if (options.record_genes) {
    for (const PoolEntry& e : pool.entries()) {
      rec.genes.push_back({e.id, effective_gene(e.genes, cfg)});
    }
  }
  return rec;
}

namespace {

struct Split {
  std::vector<Instance> warm;
  std::vector<Instance> online;
};

Split split_series(std::span<const double> series, const EngineConfig& config) {
  config.validate();
  for (double v : series) {
    if (!std::isfinite(v)) throw Error(ErrorKind::Numeric, "series contains non-finite values");
  }
  const std::size_t need = minimum_series_length(config.lookback, config.horizon);
  if (series.size() < need) {
    throw Error(ErrorKind::Sizing, "series of length " + std::to_string(series.size()) +
                                       " is too short: lookback " + std::to_string(config.lookback) +
                                       " and horizon " + std::to_string(config.horizon) +
                                       " need at least " + std::to_string(need) + " points");
  }
  return {warm_instances(series, config.lookback, config.horizon),
          online_instances(series, config.lookback, config.horizon)};
}

void summarize(RunResult& result, std::size_t final_pool_size) {
  RunSummary& s = result.summary;
  s.instances = result.records.size();
  double total = 0.0;
  for (const auto& r : result.records) {
    total += r.mse;
    if (r.evolved) ++s.total_evolutions;
    s.total_eliminations += r.eliminated.size();
  }
  s.mean_mse = s.instances ? total / static_cast<double>(s.instances) : 0.0;
  s.final_pool_size = final_pool_size;
}

}  // namespace

RunResult run(std::span<const double> series, const EngineConfig& config) {
  const Split split = split_series(series, config);
  const std::size_t scope = config.gene_scope();

  Pool pool = make_pool(config, compute_gene(split.warm.front().x, scope));
  RunResult result;
  result.events.push_back({PoolEventKind::Created, pool.at(0).id, std::nullopt, 0});
  warm_up(pool, split.warm, config.warm_epochs, config.learning_rate(), scope);

  const StepOptions options{scope, config.record_forecasts, config.record_genes};
  result.records.reserve(split.online.size());
  for (const Instance& inst : split.online) {
    result.records.push_back(online_step(pool, inst, options, &result.events));
  }
  summarize(result, pool.size());
  return result;
}

RunResult run_baseline(std::span<const double> series, const EngineConfig& config) {
  const Split split = split_series(series, config);
  const double lr = config.learning_rate();
  auto model = make_forecaster(config.forecaster, config.lookback, config.horizon, config.hidden,
                               config.seed);
  // gene bookkeeping only feeds the recorded trajectory; it never alters a forecast
  const std::size_t scope = config.gene_scope();
  PoolEntry genes;
  genes.genes = GeneState::seeded(compute_gene(split.warm.front().x, scope));
  for (std::size_t epoch = 0; epoch < config.warm_epochs; ++epoch) {
    for (const Instance& inst : split.warm) {
      model->train_step(inst.x, inst.y, lr);
      if (config.record_genes) absorb_instance(genes, compute_gene(inst.x, scope), config.cep);
    }
  }

  RunResult result;
  result.events.push_back({PoolEventKind::Created, EntryId{0}, std::nullopt, 0});
  for (const Instance& inst : split.online) {
    InstanceRecord rec;
    rec.t = inst.t;
    auto forecast = model->predict(inst.x);
    for (double v : forecast) {
      if (!std::isfinite(v)) throw Error(ErrorKind::Numeric, "non-finite forecast at t=" + std::to_string(inst.t));
    }
    rec.mse = mse(forecast, inst.y);
    if (config.record_forecasts) rec.forecast = std::move(forecast);
    model->train_step(inst.x, inst.y, lr);
    rec.pool_size = 1;
    if (config.record_genes) {
      absorb_instance(genes, compute_gene(inst.x, scope), config.cep);
      rec.genes.push_back({EntryId{0}, effective_gene(genes.genes, config.cep)});
    }
    result.records.push_back(std::move(rec));
  }
  summarize(result, 1);
  return result;
}

}  // namespace driftpool
