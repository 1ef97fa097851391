#pragma once

#include <cstddef>
#include <span>

namespace driftpool {

/// Floor applied to every sigma used as a divisor or threshold scale.
inline constexpr double kSigmaFloor = 1e-8;

/// (mean, std) signature of a window; the unit of concept identity.
struct GeneVector {
  double mu = 0.0;
  double sigma = 0.0;

  friend bool operator==(const GeneVector&, const GeneVector&) = default;
};

/// Short-term (EMA) and long-term (running moments over absorbed instance
/// means) genes of one forecaster. `count` is the number of absorbed genes.
struct GeneState {
  GeneVector local;
  GeneVector global;
  std::size_t count = 1;

  static GeneState seeded(GeneVector g) { return GeneState{g, g, 1}; }

  friend bool operator==(const GeneState&, const GeneState&) = default;
};

/// Population mean and std (divisor n) of the last `scope` values of `window`.
/// A scope larger than the window uses the whole window.
GeneVector compute_gene(std::span<const double> window, std::size_t scope);

/// tau_l * instance + (1 - tau_l) * local, component-wise.
GeneVector ema_update(GeneVector local, GeneVector instance, double tau_l);

struct GlobalUpdate {
  GeneVector gene;
  std::size_t count;
};

/// Folds one instance mean into running population moments over `count`
/// previously absorbed means. Only `instance.mu` participates.
GlobalUpdate global_update(GeneVector global, std::size_t count, GeneVector instance);

/// tau_gene * local + (1 - tau_gene) * global.
GeneVector mix_gene(const GeneState& state, double tau_gene);

/// Euclidean distance in (mu, sigma) space.
double gene_distance(GeneVector a, GeneVector b) noexcept;

/// Gaussian negative log-likelihood cost (up to constants) of a window with
/// sample statistics `sample` under a concept with parameters `candidate`.
/// The candidate sigma is floored at kSigmaFloor.
double mle_cost(GeneVector candidate, GeneVector sample);

}  // namespace driftpool
