#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "driftpool/config.hpp"
#include "driftpool/forecaster.hpp"
#include "driftpool/gene.hpp"

namespace driftpool {

/// Creation index of a pool entry. Strictly increasing, never reused.
struct EntryId {
  std::uint64_t value = 0;
  friend auto operator<=>(const EntryId&, const EntryId&) = default;
};

struct PoolEntry {
  EntryId id;
  std::optional<EntryId> parent;
  std::unique_ptr<Forecaster> forecaster;
  GeneState genes;
  std::size_t n_pred = 0;  // instances predicted (warm-up steps included)
  std::size_t n_wait = 0;  // instances elapsed since last selection
  double lr = 0.0;
  std::size_t lr_warm_steps_remaining = 0;
};

/// Gene used for retrieval and drift tests, honoring the local/global switches.
GeneVector effective_gene(const GeneState& genes, const CepConfig& config);

/// Three-sigma split test on the mean, gated by the evolution switch and the
/// safety period.
bool should_evolve(const PoolEntry& entry, GeneVector sample, const CepConfig& config);

/// Restores a reduced learning rate toward lr_raw by a factor of
/// tau_lr^(-1/t_lr) per call, capped at lr_raw. Returns the new rate.
double lr_tick(PoolEntry& entry, double lr_raw, const CepConfig& config);

/// EMA update of the local gene and running-moment update of the global gene.
void absorb_instance(PoolEntry& entry, GeneVector instance, const CepConfig& config);

struct EvolveResult {
  std::size_t index;              // position of the new entry
  std::vector<EntryId> evicted;   // entries dropped by the FIFO cap
};

class Pool {
 public:
  Pool(std::unique_ptr<Forecaster> initial, GeneState genes, double lr_raw, CepConfig config);

  Pool(Pool&&) noexcept = default;
  Pool& operator=(Pool&&) noexcept = default;

  std::size_t size() const noexcept { return entries_.size(); }
  std::span<const PoolEntry> entries() const noexcept { return entries_; }
  PoolEntry& at(std::size_t index) { return entries_.at(index); }
  const PoolEntry& at(std::size_t index) const { return entries_.at(index); }
  std::optional<std::size_t> index_of(EntryId id) const noexcept;

  double lr_raw() const noexcept { return lr_raw_; }
  const CepConfig& config() const noexcept { return config_; }

  /// Retrieval score of `sample` against an entry; lower is closer.
  double score(const PoolEntry& entry, GeneVector sample) const;

  /// Index of the entry with the lowest score; ties go to the smallest id.
  std::size_t nearest(GeneVector sample) const;

  /// Appends a clone of entries()[parent] seeded with `sample` as both genes.
  EvolveResult evolve(std::size_t parent, GeneVector sample);

  /// Selected entry: n_pred += 1 and n_wait = 0; every other entry: n_wait += 1.
  void mark_selected(std::size_t index);

  /// Drops entries with n_wait > tau_e * n_pred, never `keep` and never the
  /// last remaining entry. Returns removed ids in creation order.
  std::vector<EntryId> eliminate_stale(EntryId keep);

  EntryId next_id() const noexcept { return EntryId{next_id_}; }

 private:
  std::vector<PoolEntry> entries_;
  double lr_raw_;
  CepConfig config_;
  std::uint64_t next_id_ = 0;
};

}  // namespace driftpool
