#include "driftpool/pool.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "driftpool/error.hpp"

namespace driftpool {

GeneVector effective_gene(const GeneState& genes, const CepConfig& config) {
  if (config.use_local_gene && !config.use_global_gene) return genes.local;
  if (!config.use_local_gene && config.use_global_gene) return genes.global;
  return mix_gene(genes, config.tau_gene);
}

bool should_evolve(const PoolEntry& entry, GeneVector sample, const CepConfig& config) {
  if (!config.evolution || entry.n_pred < config.tau_safe) return false;
  const GeneVector g = effective_gene(entry.genes, config);
  return std::abs(sample.mu - g.mu) > config.tau_mu * std::max(g.sigma, kSigmaFloor);
}

double lr_tick(PoolEntry& entry, double lr_raw, const CepConfig& config) {
  if (!(config.tau_lr > 0.0)) throw Error(ErrorKind::Validation, "tau_lr must be > 0");
  const double growth = std::pow(config.tau_lr, -1.0 / static_cast<double>(config.t_lr));
  entry.lr = std::min(lr_raw, growth * entry.lr);
  if (entry.lr_warm_steps_remaining > 0) --entry.lr_warm_steps_remaining;
  return entry.lr;
}

void absorb_instance(PoolEntry& entry, GeneVector instance, const CepConfig& config) {
  entry.genes.local = ema_update(entry.genes.local, instance, config.tau_l);
  const auto g = global_update(entry.genes.global, entry.genes.count, instance);
  entry.genes.global = g.gene;
  entry.genes.count = g.count;
}

Pool::Pool(std::unique_ptr<Forecaster> initial, GeneState genes, double lr_raw, CepConfig config)
    : lr_raw_(lr_raw), config_(config) {
  config_.validate();
  if (!initial) throw Error(ErrorKind::State, "pool requires an initial forecaster");
  if (!(lr_raw > 0.0) || !std::isfinite(lr_raw)) {
    throw Error(ErrorKind::Validation, "lr must be finite and > 0");
  }
  PoolEntry first;
  first.id = EntryId{next_id_++};
  first.forecaster = std::move(initial);
  first.genes = genes;
  first.lr = lr_raw_;
  entries_.push_back(std::move(first));
}

std::optional<std::size_t> Pool::index_of(EntryId id) const noexcept {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].id == id) return i;
  }
  return std::nullopt;
}

double Pool::score(const PoolEntry& entry, GeneVector sample) const {
  const GeneVector g = effective_gene(entry.genes, config_);
  return config_.retrieval == RetrievalScore::Mle ? mle_cost(g, sample) : gene_distance(sample, g);
}

std::size_t Pool::nearest(GeneVector sample) const {
  // entries_ is kept in id order, so a strict comparison keeps the oldest on ties.
  std::size_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const double s = score(entries_[i], sample);
    if (s < best_score) {
      best_score = s;
      best = i;
    }
  }
  return best;
}

EvolveResult Pool::evolve(std::size_t parent, GeneVector sample) {
  const PoolEntry& source = entries_.at(parent);
  PoolEntry child;
  child.id = EntryId{next_id_++};
  child.parent = source.id;
  child.forecaster = source.forecaster->clone();
  child.genes = GeneState::seeded(sample);
  if (config_.optimizer_adjustment) {
    child.lr = config_.tau_lr * lr_raw_;
    child.lr_warm_steps_remaining = config_.t_lr;
  } else {
    child.lr = lr_raw_;
  }
  entries_.push_back(std::move(child));

  EvolveResult result{entries_.size() - 1, {}};
  if (config_.max_pool_size) {
    while (entries_.size() > *config_.max_pool_size) {
      result.evicted.push_back(entries_.front().id);
      entries_.erase(entries_.begin());
    }
    result.index = entries_.size() - 1;
  }
  return result;
}

void Pool::mark_selected(std::size_t index) {
  if (index >= entries_.size()) throw Error(ErrorKind::State, "selected entry not in pool");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (i == index) {
      ++entries_[i].n_pred;
      entries_[i].n_wait = 0;
    } else {
      ++entries_[i].n_wait;
    }
  }
}

std::vector<EntryId> Pool::eliminate_stale(EntryId keep) {
  std::vector<EntryId> removed;
  if (!config_.elimination) return removed;

  auto stale = [&](const PoolEntry& e) {
    return e.id != keep &&
           static_cast<double>(e.n_wait) > config_.tau_e * static_cast<double>(e.n_pred);
  };
  const bool keep_present = index_of(keep).has_value();
  if (!keep_present && std::all_of(entries_.begin(), entries_.end(), stale)) {
    // Spare the most recently selected entry so forecasting stays possible.
    auto survivor = std::min_element(entries_.begin(), entries_.end(),
                                     [](const PoolEntry& a, const PoolEntry& b) {
                                       return a.n_wait < b.n_wait;
                                     });
    keep = survivor->id;
  }
  std::erase_if(entries_, [&](const PoolEntry& e) {
    if (!stale(e)) return false;
    removed.push_back(e.id);
    return true;
  });
  return removed;
}

}  // namespace driftpool
