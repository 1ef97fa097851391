#include "driftpool/gene.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "driftpool/error.hpp"

namespace driftpool {

GeneVector compute_gene(std::span<const double> window, std::size_t scope) {
  if (window.empty()) throw Error(ErrorKind::Numeric, "empty window");
  if (scope == 0) throw Error(ErrorKind::Validation, "gene scope must be >= 1");
  const std::size_t n = std::min(scope, window.size());
  const auto tail = window.last(n);

  double sum = 0.0;
  for (double v : tail) {
    if (!std::isfinite(v)) throw Error(ErrorKind::Numeric, "non-finite input");
    sum += v;
  }
  const double mean = sum / static_cast<double>(n);
  double sq = 0.0;
  for (double v : tail) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / static_cast<double>(n))};
}

GeneVector ema_update(GeneVector local, GeneVector instance, double tau_l) {
  if (!(tau_l > 0.0 && tau_l <= 1.0)) {
    throw Error(ErrorKind::Validation,
                "tau_l must lie in (0, 1], got " + std::to_string(tau_l));
  }
  if (tau_l == 1.0) return instance;
  // incremental form: a window matching the local gene leaves it exactly unchanged
  return {local.mu + tau_l * (instance.mu - local.mu),
          local.sigma + tau_l * (instance.sigma - local.sigma)};
}

GlobalUpdate global_update(GeneVector global, std::size_t count, GeneVector instance) {
  if (count < 1) throw Error(ErrorKind::State, "global gene count must be >= 1");
  const double n = static_cast<double>(count);
  const double n1 = n + 1.0;
  const double delta = global.mu - instance.mu;
  const double mean = (n * global.mu + instance.mu) / n1;
  const double var = (n / n1) * global.sigma * global.sigma + (n / (n1 * n1)) * delta * delta;
  return {{mean, std::sqrt(std::max(var, 0.0))}, count + 1};
}

GeneVector mix_gene(const GeneState& state, double tau_gene) {
  if (!(tau_gene >= 0.0 && tau_gene <= 1.0)) {
    throw Error(ErrorKind::Validation,
                "tau_gene must lie in [0, 1], got " + std::to_string(tau_gene));
  }
  if (tau_gene == 1.0) return state.local;
  if (tau_gene == 0.0) return state.global;
  return {tau_gene * state.local.mu + (1.0 - tau_gene) * state.global.mu,
          tau_gene * state.local.sigma + (1.0 - tau_gene) * state.global.sigma};
}

double gene_distance(GeneVector a, GeneVector b) noexcept {
  return std::hypot(a.mu - b.mu, a.sigma - b.sigma);
}

double mle_cost(GeneVector candidate, GeneVector sample) {
  const double sigma = std::max(candidate.sigma, kSigmaFloor);
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorKind::Numeric, "mle_cost requires a positive candidate sigma");
  }
  const double var = sigma * sigma;
  const double d = sample.mu - candidate.mu;
  return 2.0 * std::log(sigma) + (sample.sigma * sample.sigma) / var + (d * d) / var;
}

}  // namespace driftpool
