#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "muxcent/multiplex.hpp"
#include "muxcent/ranks.hpp"

namespace muxcent {

// Everything a centrality run wants to tell the caller besides the scores.
struct Diagnostics {
  std::optional<double> totalRate;            // combined event rate the scores were computed under
  std::optional<double> gammaUsed;            // regularization strength actually applied
  std::optional<double> gammaBound;           // smallest gamma guaranteeing an all-positive allocation
  bool gammaBoundIsEstimate = false;          // true when the bound came from the cheap large-network formula
  std::optional<ConditionReport> conditions;  // stability check, when one was run
  std::vector<Eigen::Index> ties;             // nodes whose score ties another node's
  std::vector<std::string> warnings;
};

// Scores plus derived views: fractional ranks (1 = highest) and, for
// budget-allocating measures, each node's share of the budget.
struct CentralityResult {
  Eigen::VectorXd values;
  std::optional<Eigen::VectorXd> budgetShares;
  Eigen::VectorXd ranks;
  Diagnostics diagnostics;
};

inline CentralityResult makeResult(Eigen::VectorXd values, std::optional<double> budget = std::nullopt) {
  CentralityResult r;
  r.values = std::move(values);
  if (budget && *budget > 0.0) {
    r.budgetShares = r.values / *budget;
  }
  r.ranks = fractionalRanks(r.values);
  r.diagnostics.ties = tiedIndices(r.values);
  return r;
}

}  // namespace muxcent
