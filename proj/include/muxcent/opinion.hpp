#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "muxcent/errors.hpp"
#include "muxcent/linalg.hpp"
#include "muxcent/multiplex.hpp"
#include "muxcent/result.hpp"

namespace muxcent {

// Largest network for which the exact regularization bound (a dense inverse)
// is attempted by default.
inline constexpr Eigen::Index kDenseGammaCap = 4000;

inline std::string describeConditionFailure(const ConditionReport& r) {
  if (!r.rowSumsOk) {
    return "influence row sum " + std::to_string(r.maxRowSum) + " at node index " + std::to_string(r.worstRow) +
           " reaches 1; the mean dynamics have no stable fixed point";
  }
  return "top eigenvalue of the symmetric influence part is " + std::to_string(r.symTopEigenvalue) +
         " (stability needs < 1)";
}

namespace detail {

inline ConditionReport requireStable(const EffectiveMatrix& eff) {
  ConditionReport report = validateConditions(eff);
  if (!report.ok) {
    throw ConditionError(describeConditionFailure(report));
  }
  return report;
}

inline void requireBudget(double budget) {
  if (!(budget > 0.0) || !std::isfinite(budget)) {
    throw InputError("budget must be positive");
  }
}

inline double allocationBudget(const ModelParams& params) {
  if (params.lambda) {
    throw InputError("budget allocation starts from a total budget; pass `budget`, not fixed per-node rates");
  }
  requireBudget(params.budget);
  return params.budget;
}

}  // namespace detail

// Total long-run influence of each node: column sums of (Id - Ebar)^{-1},
// computed as one transposed solve instead of a matrix inverse.  Column j's
// sum measures how much one unit of external rate on j lifts the sum of
// stationary opinions, times the total event rate; every entry is >= 1.
inline Eigen::VectorXd columnInfluence(const EffectiveMatrix& eff) {
  SparseMatrix mt = SparseMatrix(linalg::identityMinus(eff.matrix()).transpose());
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(eff.size());
  return linalg::solveChecked(mt, ones, "column influence");
}

struct GammaBound {
  double value = 0.0;
  bool isEstimate = false;  // true when derived from column influence instead of the dense inverse
};

// Smallest regularization strength that guarantees a fully positive budget
// split: I^2 / (rate * R) times the entry spread of (Id - Ebar)^{-1}.  The
// spread needs the dense inverse, so networks above `denseCap` nodes are
// refused; use the estimate below instead.
inline GammaBound gammaPositivityBound(const EffectiveMatrix& eff, double budget,
                                       Eigen::Index denseCap = kDenseGammaCap) {
  detail::requireBudget(budget);
  if (eff.size() > denseCap) {
    throw CapacityError("exact regularization bound needs a dense " + std::to_string(eff.size()) +
                        "^2 inverse; the limit is " + std::to_string(denseCap) +
                        " nodes (use the automatic gamma, which falls back to a cheap estimate)");
  }
  const Eigen::MatrixXd inv = linalg::denseInverseIdentityMinus(eff.matrix(), "regularization bound");
  const double spread = inv.maxCoeff() - inv.minCoeff();
  const double n = static_cast<double>(eff.size());
  return {n * n * spread / (eff.totalRate() * budget), false};
}

// Cheap upper bound on the same quantity, usable at any size: the entry
// spread of the inverse never exceeds 1 + max column influence.
inline GammaBound gammaPositivityEstimate(const EffectiveMatrix& eff, double budget,
                                          const Eigen::VectorXd& influence) {
  detail::requireBudget(budget);
  const double n = static_cast<double>(eff.size());
  return {n * n * (1.0 + influence.maxCoeff()) / (eff.totalRate() * budget), true};
}

// Opinion centrality: the budget split lambda* maximizing
//   sum of stationary opinions - gamma/2 * |lambda|^2
// over {lambda >= 0, sum lambda = R}, in closed form:
//   lambda*_j = R/I + (influence_j - mean influence) / (gamma * rate).
// With gamma at least the positivity bound the simplex constraints are slack
// and the formula is exact.  When `gamma` is not given it defaults to twice
// the bound — the exact bound when the network is small enough for a dense
// inverse, the conservative estimate otherwise.
inline CentralityResult opinionCentrality(const EffectiveMatrix& eff, double budget,
                                          std::optional<double> gamma = std::nullopt,
                                          Eigen::Index denseCap = kDenseGammaCap) {
  detail::requireBudget(budget);
  const ConditionReport report = detail::requireStable(eff);
  const Eigen::VectorXd influence = columnInfluence(eff);

  std::vector<std::string> warnings;
  const GammaBound bound = eff.size() <= denseCap ? gammaPositivityBound(eff, budget, denseCap)
                                                  : gammaPositivityEstimate(eff, budget, influence);
  double g;
  if (gamma) {
    g = *gamma;
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw InputError("gamma must be positive");
    }
  } else {
    g = 2.0 * bound.value;
    if (g <= 0.0) {
      // no influence spread at all (e.g. a single node); any gamma gives the uniform split
      g = 1.0;
      warnings.push_back("influence spread is zero; regularization has no effect");
    }
  }

  const double n = static_cast<double>(eff.size());
  const Eigen::VectorXd values = Eigen::VectorXd::Constant(eff.size(), budget / n) +
                                 (influence.array() - influence.mean()).matrix() / (g * eff.totalRate());

  CentralityResult result = makeResult(values, budget);
  result.diagnostics.warnings = std::move(warnings);
  result.diagnostics.totalRate = eff.totalRate();
  result.diagnostics.gammaUsed = g;
  result.diagnostics.gammaBound = bound.value;
  result.diagnostics.gammaBoundIsEstimate = bound.isEstimate;
  result.diagnostics.conditions = report;
  if (result.values.minCoeff() < 0.0) {
    result.diagnostics.warnings.push_back(
        "allocation has negative entries: gamma is below the positivity bound, so the unconstrained formula leaves "
        "the simplex");
  }
  return result;
}

inline CentralityResult opinionCentrality(const MultiplexNetwork& net, const ModelParams& params,
                                          std::optional<double> gamma = std::nullopt,
                                          Eigen::Index denseCap = kDenseGammaCap) {
  const double budget = detail::allocationBudget(params);
  return opinionCentrality(effectiveMatrix(net, params), budget, gamma, denseCap);
}

// Budget split under no regularization: everything on the single most
// influential node, lowest index on a tie (the tie is reported, since then
// the unregularized problem has multiple optima).
inline CentralityResult naiveOpinionCentrality(const EffectiveMatrix& eff, double budget,
                                               const std::vector<std::string>* nodeIds = nullptr) {
  detail::requireBudget(budget);
  const ConditionReport report = detail::requireStable(eff);
  const Eigen::VectorXd influence = columnInfluence(eff);

  Eigen::Index best = 0;
  influence.maxCoeff(&best);  // first maximizer
  std::vector<Eigen::Index> argmax;
  for (Eigen::Index i = 0; i < influence.size(); ++i) {
    if (influence[i] == influence[best]) argmax.push_back(i);
  }

  Eigen::VectorXd values = Eigen::VectorXd::Zero(eff.size());
  values[best] = budget;
  CentralityResult result = makeResult(std::move(values), budget);
  result.diagnostics.totalRate = eff.totalRate();
  result.diagnostics.conditions = report;
  result.diagnostics.ties.clear();
  if (argmax.size() > 1) {
    result.diagnostics.ties = argmax;
    std::string names;
    for (auto i : argmax) {
      if (!names.empty()) names += ", ";
      names += nodeIds ? (*nodeIds)[static_cast<std::size_t>(i)] : std::to_string(i);
    }
    result.diagnostics.warnings.push_back("maximum influence is tied between nodes " + names +
                                          "; the budget goes to the first");
  }
  return result;
}

inline CentralityResult naiveOpinionCentrality(const MultiplexNetwork& net, const ModelParams& params) {
  const double budget = detail::allocationBudget(params);
  return naiveOpinionCentrality(effectiveMatrix(net, params), budget, &net.nodeIds());
}

// Column influence as a plain per-node score.  Carries the same fractional
// ranks as any opinion centrality result on the same network, whatever the
// budget and regularization.
inline CentralityResult rawOpinionScore(const EffectiveMatrix& eff) {
  const ConditionReport report = detail::requireStable(eff);
  CentralityResult result = makeResult(columnInfluence(eff));
  result.diagnostics.totalRate = eff.totalRate();
  result.diagnostics.conditions = report;
  return result;
}

inline CentralityResult rawOpinionScore(const MultiplexNetwork& net, const ModelParams& params) {
  return rawOpinionScore(effectiveMatrix(net, params));
}

// ---------------------------------------------------------------------------
// Numeric optimizer, used to cross-check the closed form and to explore
// utilities beyond the sum of opinions.

enum class UtilityKind { Linear, WeightedMin, CobbDouglas };

struct UtilitySpec {
  UtilityKind kind = UtilityKind::Linear;
  Eigen::VectorXd weights;  // per-node; empty means all ones

  static UtilitySpec linear() { return {}; }
  static UtilitySpec weightedMin(Eigen::VectorXd w) { return {UtilityKind::WeightedMin, std::move(w)}; }
  static UtilitySpec cobbDouglas(Eigen::VectorXd w) { return {UtilityKind::CobbDouglas, std::move(w)}; }
};

inline Eigen::VectorXd utilityWeights(const UtilitySpec& u, Eigen::Index n) {
  if (u.weights.size() == 0) return Eigen::VectorXd::Ones(n);
  if (u.weights.size() != n) {
    throw InputError("utility weights must have one entry per node");
  }
  if (!u.weights.allFinite() || u.weights.minCoeff() <= 0.0) {
    throw InputError("utility weights must be finite and positive");
  }
  return u.weights;
}

inline double evaluateUtility(const Eigen::VectorXd& x, const UtilitySpec& u) {
  const Eigen::VectorXd w = utilityWeights(u, x.size());
  switch (u.kind) {
    case UtilityKind::Linear:
      return w.dot(x);
    case UtilityKind::WeightedMin:
      return (w.array() * x.array()).minCoeff();
    case UtilityKind::CobbDouglas:
      // evaluated in log space to avoid underflow; any zero opinion gives zero
      if (x.minCoeff() <= 0.0) return 0.0;
      return std::exp((w.array() * x.array().log()).sum());
  }
  throw InputError("unknown utility kind");
}

// Euclidean projection onto { v >= 0, sum v = total } by the sort-and-shift
// rule.
inline Eigen::VectorXd projectSimplex(const Eigen::VectorXd& v, double total) {
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw InputError("simplex total must be positive");
  }
  std::vector<double> u(v.data(), v.data() + v.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cum += u[k];
    const double t = (cum - total) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) {
      theta = t;
    } else {
      break;
    }
  }
  return (v.array() - theta).max(0.0);
}

struct OptimizeOptions {
  double tol = 1e-9;  // on the projected gradient mapping, infinity norm
  std::int64_t maxIters = 500000;
};

struct OptimizeOutcome {
  Eigen::VectorXd allocation;
  double objective = 0.0;
  std::int64_t iterations = 0;
  double residual = 0.0;
};

// Projected gradient ascent on U(x*(lambda)) - gamma/2 |lambda|^2 over the
// budget simplex.  The step starts at 1/(gamma + max influence / rate), a
// Lipschitz surrogate for the linear utility, and halves whenever a step
// would decrease the objective; if it collapses entirely (possible only at a
// kink of the weighted-min utility), the current iterate is returned as the
// solution.  gamma = 0 is allowed: the linear problem then degenerates to an
// LP whose optimum sits on a simplex vertex, which the iteration reaches
// exactly.  For the linear utility this is an independent check of the
// closed form; the other utilities are exploratory.
inline OptimizeOutcome optimizeBudgetNumeric(const EffectiveMatrix& eff, double budget, double gamma,
                                             const UtilitySpec& utility = {}, const OptimizeOptions& opts = {}) {
  detail::requireBudget(budget);
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw InputError("gamma must be non-negative");
  }
  if (!(opts.tol > 0.0)) {
    throw InputError("tolerance must be positive");
  }
  detail::requireStable(eff);
  const Eigen::Index n = eff.size();
  const double rate = eff.totalRate();
  const Eigen::VectorXd w = utilityWeights(utility, n);
  const Eigen::VectorXd influence = columnInfluence(eff);

  const SparseMatrix m = linalg::identityMinus(eff.matrix());
  const SparseMatrix mt = SparseMatrix(m.transpose());
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(m);
  Eigen::SparseLU<SparseMatrix> luT;
  luT.compute(mt);
  if (lu.info() != Eigen::Success || luT.info() != Eigen::Success) {
    throw NumericalError("budget optimizer: factorization of the influence system failed");
  }
  auto stationary = [&](const Eigen::VectorXd& lambda) -> Eigen::VectorXd { return lu.solve(lambda / rate); };

  // For the linear utility the pull of each budget unit is constant.
  Eigen::VectorXd linearGrad;
  if (utility.kind == UtilityKind::Linear) {
    linearGrad = luT.solve(w) / rate;
  }

  auto objective = [&](const Eigen::VectorXd& lambda) {
    return evaluateUtility(stationary(lambda), utility) - 0.5 * gamma * lambda.squaredNorm();
  };
  auto gradient = [&](const Eigen::VectorXd& lambda) -> Eigen::VectorXd {
    switch (utility.kind) {
      case UtilityKind::Linear:
        return linearGrad - gamma * lambda;
      case UtilityKind::WeightedMin: {
        // supergradient through the first minimizing coordinate
        const Eigen::VectorXd x = stationary(lambda);
        Eigen::Index argmin = 0;
        (w.array() * x.array()).minCoeff(&argmin);
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
        e[argmin] = w[argmin];
        return luT.solve(e) / rate - gamma * lambda;
      }
      case UtilityKind::CobbDouglas: {
        const Eigen::VectorXd x = stationary(lambda).cwiseMax(1e-12);
        const double u = std::exp((w.array() * x.array().log()).sum());
        const Eigen::VectorXd pull = (u * w.array() / x.array()).matrix();
        return luT.solve(pull) / rate - gamma * lambda;
      }
    }
    throw InputError("unknown utility kind");
  };

  const double lipschitz = gamma + influence.maxCoeff() / rate;
  double step = 1.0 / lipschitz;

  Eigen::VectorXd lambda = Eigen::VectorXd::Constant(n, budget / static_cast<double>(n));
  double obj = objective(lambda);
  double residual = 0.0;
  for (std::int64_t iter = 1; iter <= opts.maxIters; ++iter) {
    const Eigen::VectorXd cand = projectSimplex(lambda + step * gradient(lambda), budget);
    residual = (cand - lambda).lpNorm<Eigen::Infinity>() / step;
    if (residual <= opts.tol) {
      return {lambda, obj, iter, residual};
    }
    const double objCand = objective(cand);
    const double band = 1e-12 * std::max(1.0, std::abs(obj));
    // The smooth utilities converge because the projected step is a
    // contraction; halving only has to undo an overshoot (a strictly worse
    // candidate).  The weighted-min supergradient instead flip-flops across
    // kinks at constant amplitude, so for it any step that fails to make
    // measurable progress must shrink — otherwise the flip-flop never ends.
    const bool worse = objCand < obj - band;
    const bool stalled = utility.kind == UtilityKind::WeightedMin && objCand < obj + band;
    if (worse || stalled) {
      step *= 0.5;
      if (step < 1e-18) {
        // No step along the (super)gradient makes progress.  For weighted-min
        // this is how landing on a kink — typically the optimum itself —
        // looks, so report the iterate instead of failing.
        return {lambda, obj, iter, residual};
      }
      continue;
    }
    lambda = cand;
    obj = objCand;
  }
  throw NumericalError("budget optimizer did not converge within " + std::to_string(opts.maxIters) +
                       " iterations; last residual " + std::to_string(residual));
}

inline OptimizeOutcome optimizeBudgetNumeric(const MultiplexNetwork& net, const ModelParams& params, double gamma,
                                             const UtilitySpec& utility = {}, const OptimizeOptions& opts = {}) {
  const double budget = detail::allocationBudget(params);
  return optimizeBudgetNumeric(effectiveMatrix(net, params), budget, gamma, utility, opts);
}

}  // namespace muxcent
