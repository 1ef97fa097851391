#include "driftpool/config.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "driftpool/error.hpp"

namespace driftpool {

std::string_view to_string(RetrievalScore score) noexcept {
  return score == RetrievalScore::Mle ? "mle" : "euclidean";
}

RetrievalScore parse_retrieval_score(std::string_view name) {
  if (name == "euclidean") return RetrievalScore::Euclidean;
  if (name == "mle") return RetrievalScore::Mle;
  throw Error(ErrorKind::Validation,
              "score: expected euclidean|mle, got '" + std::string(name) + "'");
}

namespace {

[[noreturn]] void reject(std::string_view field, double value, std::string_view range) {
  std::ostringstream os;
  os << field << " = " << value << " is outside its legal range " << range;
  throw Error(ErrorKind::Validation, os.str());
}

}  // namespace

void CepConfig::validate() const {
  if (!(tau_mu > 0.0) || !std::isfinite(tau_mu)) reject("tau_mu", tau_mu, "(0, inf)");
  if (!(tau_gene >= 0.0 && tau_gene <= 1.0)) reject("tau_gene", tau_gene, "[0, 1]");
  if (!(tau_l > 0.0 && tau_l <= 1.0)) reject("tau_l", tau_l, "(0, 1]");
  if (!(tau_e > 0.0) || !std::isfinite(tau_e)) reject("tau_e", tau_e, "(0, inf)");
  if (!(tau_lr > 0.0 && tau_lr <= 1.0)) reject("tau_lr", tau_lr, "(0, 1]");
  if (t_lr < 1) reject("t_lr", static_cast<double>(t_lr), "[1, inf)");
  if (max_pool_size && *max_pool_size < 1) {
    reject("max_pool", static_cast<double>(*max_pool_size), "[1, inf)");
  }
  if (!use_local_gene && !use_global_gene) {
    throw Error(ErrorKind::Validation,
                "use_local_gene and use_global_gene cannot both be disabled");
  }
}

}  // namespace driftpool
