#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "driftpool/config.hpp"
#include "driftpool/forecaster.hpp"
#include "driftpool/gene.hpp"
#include "driftpool/pool.hpp"

namespace driftpool {

struct EngineConfig {
  std::size_t lookback = 60;
  std::size_t horizon = 30;
  ForecasterKind forecaster = ForecasterKind::Linear;
  std::size_t hidden = 32;             // MLP hidden width
  std::optional<double> lr;            // defaults per forecaster kind
  std::size_t warm_epochs = 5;
  std::uint64_t seed = 0;
  CepConfig cep;
  bool record_forecasts = false;
  bool record_genes = false;

  /// Raw learning rate: `lr` if set, else 0.01 (linear, naive) or 0.003 (mlp).
  double learning_rate() const noexcept;
  /// Gene scope S, defaulting to the look-back length.
  std::size_t gene_scope() const noexcept { return cep.scope == 0 ? lookback : cep.scope; }
  void validate() const;

  friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

/// One (input, ground truth) pair; y starts right after x ends.
struct Instance {
  std::span<const double> x;
  std::span<const double> y;
  std::size_t t = 0;  // stream index of x[0]
};

/// Stride-1 instances over the first warm_length(n) points.
std::vector<Instance> warm_instances(std::span<const double> series, std::size_t lookback,
                                     std::size_t horizon);
/// Stride-`horizon` instances over the remaining points. A trailing instance
/// whose y would overrun the series is dropped.
std::vector<Instance> online_instances(std::span<const double> series, std::size_t lookback,
                                       std::size_t horizon);
/// Smallest series length admitting at least one warm and one online instance.
std::size_t minimum_series_length(std::size_t lookback, std::size_t horizon);

struct GeneSample {
  EntryId id;
  GeneVector gene;
  friend bool operator==(const GeneSample&, const GeneSample&) = default;
};

struct InstanceRecord {
  std::size_t t = 0;
  EntryId selected;
  double mse = 0.0;
  bool evolved = false;
  bool abandoned = false;
  std::vector<EntryId> eliminated;
  std::size_t pool_size = 0;
  std::vector<double> forecast;   // filled when record_forecasts is set
  std::vector<GeneSample> genes;  // effective gene of every entry, when record_genes is set

  friend bool operator==(const InstanceRecord&, const InstanceRecord&) = default;
};

enum class PoolEventKind { Created, Eliminated, Evicted };

struct PoolEvent {
  PoolEventKind kind = PoolEventKind::Created;
  EntryId id;
  std::optional<EntryId> parent;
  std::size_t t = 0;
  friend bool operator==(const PoolEvent&, const PoolEvent&) = default;
};

struct RunSummary {
  double mean_mse = 0.0;
  std::size_t instances = 0;
  std::size_t final_pool_size = 0;
  std::size_t total_evolutions = 0;
  std::size_t total_eliminations = 0;
  friend bool operator==(const RunSummary&, const RunSummary&) = default;
};

struct RunResult {
  std::vector<InstanceRecord> records;
  std::vector<PoolEvent> events;
  RunSummary summary;
  friend bool operator==(const RunResult&, const RunResult&) = default;
};

/// Fresh single-entry pool for `config`, seeded with `seed_gene`.
Pool make_pool(const EngineConfig& config, GeneVector seed_gene);

/// Conventional training of the sole pool entry: every epoch visits every
/// instance once, taking one SGD step and absorbing the input gene. Each step
/// counts as a prediction of that entry. No evolution or elimination.
void warm_up(Pool& pool, std::span<const Instance> warm, std::size_t epochs, double lr,
             std::size_t scope);

struct StepOptions {
  std::size_t scope = 1;
  bool record_forecast = false;
  bool record_genes = false;
};

/// Evolve-or-retrieve, forecast, train (unless the gradient is abandoned),
/// bookkeeping and elimination for one online instance.
InstanceRecord online_step(Pool& pool, const Instance& instance, const StepOptions& options,
                           std::vector<PoolEvent>* events = nullptr);

/// Full warm-up plus online run with the evolution pool.
RunResult run(std::span<const double> series, const EngineConfig& config);

/// The same protocol with one forecaster and no pool: warm-up training, then
/// predict and train once per online instance at the raw learning rate.
RunResult run_baseline(std::span<const double> series, const EngineConfig& config);

}  // namespace driftpool
