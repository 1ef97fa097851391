#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace driftpool {

enum class RetrievalScore { Euclidean, Mle };

std::string_view to_string(RetrievalScore score) noexcept;
RetrievalScore parse_retrieval_score(std::string_view name);

/// Pool thresholds and mechanism switches. Defaults follow the published
/// hyperparameter table (tau_mu, tau_gene, tau_l, tau_safe, tau_e); tau_lr and
/// t_lr are not published and default to 0.5 and 15.
struct CepConfig {
  double tau_mu = 3.0;
  double tau_gene = 0.8;  // weight of the local gene in the mixed gene
  double tau_l = 0.2;
  std::size_t tau_safe = 15;
  double tau_e = 1.5;
  double tau_lr = 0.5;
  std::size_t t_lr = 15;
  std::size_t scope = 0;  // gene scope S; 0 means "use the look-back length"

  RetrievalScore retrieval = RetrievalScore::Euclidean;

  bool evolution = true;
  bool elimination = true;
  bool gradient_abandonment = true;
  bool optimizer_adjustment = true;
  bool use_local_gene = true;
  bool use_global_gene = true;

  std::optional<std::size_t> max_pool_size;

  /// Throws Error(Validation) naming the offending field and its legal range.
  void validate() const;

  friend bool operator==(const CepConfig&, const CepConfig&) = default;
};

}  // namespace driftpool
