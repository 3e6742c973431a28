#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "muxcent/baselines.hpp"
#include "muxcent/errors.hpp"
#include "muxcent/multiplex.hpp"
#include "muxcent/opinion.hpp"

namespace muxcent {

// The barrel topology: two hubs joined by a mutual edge, each the centre of a
// star whose leaves imitate only their hub.  Per layer c, three weights
// describe it completely: hubHub[c] on the hub-hub pair (both directions),
// star1[c] on every leaf of the first star, star2[c] on every leaf of the
// second.  Node 1 and node I/2+1 are the hubs.
struct BarrelSpec {
  Eigen::Index nodes = 4;
  std::vector<double> hubHub;
  std::vector<double> star1;
  std::vector<double> star2;

  std::size_t layerCount() const { return hubHub.size(); }
};

inline BarrelSpec uniformBarrelSpec(Eigen::Index nodes, std::size_t layers, double e0, double e1, double e2) {
  return {nodes, std::vector<double>(layers, e0), std::vector<double>(layers, e1), std::vector<double>(layers, e2)};
}

inline void validateBarrelSpec(const BarrelSpec& spec) {
  if (spec.nodes < 4 || spec.nodes % 2 != 0) {
    throw InputError("a barrel needs an even node count of at least 4, got " + std::to_string(spec.nodes));
  }
  if (spec.hubHub.empty() || spec.hubHub.size() != spec.star1.size() || spec.hubHub.size() != spec.star2.size()) {
    throw InputError("barrel weights must cover at least one layer, with all three weights per layer");
  }
  auto checkWeights = [](const std::vector<double>& w, const char* what) {
    for (double v : w) {
      if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
        throw InputError(std::string("barrel ") + what + " weight " + std::to_string(v) + " is outside [0, 1]");
      }
    }
  };
  checkWeights(spec.hubHub, "hub-hub");
  checkWeights(spec.star1, "star-1");
  checkWeights(spec.star2, "star-2");
}

// Nodes are labelled "1".."I" in index order, layers "L1".."LC", so the hubs
// sit at indices 0 and I/2.  Every node imitates at most one other node per
// layer, which keeps the network strictly valid for any weights in [0, 1].
inline MultiplexNetwork buildBarrel(const BarrelSpec& spec) {
  validateBarrelSpec(spec);
  const Eigen::Index n = spec.nodes;
  const Eigen::Index half = n / 2;

  std::vector<std::string> nodeIds;
  nodeIds.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) nodeIds.push_back(std::to_string(i + 1));

  std::vector<std::string> layerIds;
  std::vector<SparseMatrix> layers;
  for (std::size_t c = 0; c < spec.layerCount(); ++c) {
    layerIds.push_back("L" + std::to_string(c + 1));
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(n));
    if (spec.hubHub[c] != 0.0) {
      t.emplace_back(0, half, spec.hubHub[c]);  // hub 2 imitates hub 1
      t.emplace_back(half, 0, spec.hubHub[c]);  // hub 1 imitates hub 2
    }
    if (spec.star1[c] != 0.0) {
      for (Eigen::Index k = 1; k < half; ++k) t.emplace_back(0, k, spec.star1[c]);
    }
    if (spec.star2[c] != 0.0) {
      for (Eigen::Index k = half + 1; k < n; ++k) t.emplace_back(half, k, spec.star2[c]);
    }
    SparseMatrix m(n, n);
    m.setFromTriplets(t.begin(), t.end());
    layers.push_back(std::move(m));
  }
  return MultiplexNetwork(std::move(nodeIds), std::move(layerIds), std::move(layers));
}

// Average effect of each edge type once folded with uniform intensities:
// e'_j = alphaHat * sum_c e_jc / rate with rate = R + I*C*alphaHat.  These
// are the entries the effective matrix carries at the barrel's edge
// positions.
struct EdgeEffects {
  double hubHub = 0.0;
  double star1 = 0.0;
  double star2 = 0.0;
};

inline EdgeEffects edgeEffects(const BarrelSpec& spec, double alphaHat, double budget) {
  validateBarrelSpec(spec);
  if (!std::isfinite(alphaHat) || alphaHat < 0.0) {
    throw InputError("alpha must be finite and non-negative");
  }
  if (!std::isfinite(budget) || budget < 0.0) {
    throw InputError("budget must be finite and non-negative");
  }
  const double rate =
      budget + static_cast<double>(spec.nodes) * static_cast<double>(spec.layerCount()) * alphaHat;
  if (!(rate > 0.0)) {
    throw InputError("total event rate is zero; nothing can ever happen");
  }
  EdgeEffects e;
  for (std::size_t c = 0; c < spec.layerCount(); ++c) {
    e.hubHub += alphaHat * spec.hubHub[c] / rate;
    e.star1 += alphaHat * spec.star1[c] / rate;
    e.star2 += alphaHat * spec.star2[c] / rate;
  }
  return e;
}

// One row of the closed-form reference table for the barrel: the four node
// classes by the four measures.
struct ReferenceFormsRow {
  std::string nodeClass;
  double opinionScore = 0.0;
  double outDegree = 0.0;
  double inDegree = 0.0;
  double pagerank = 0.0;
};

// Closed-form reference expressions for the barrel, evaluated verbatim as
// published for this topology.  Kept strictly separate from computed values
// because they are not all trustworthy:
//  - the hub opinion expression uses the denominator (1 - e0')^2 where the
//    derivation gives (1 - e0'^2), and its numerator drops the leaf-count
//    factor (I/2 - 1), so it matches the computed score only approximately
//    and only at I = 4;
//  - hub out-degree e0' + e1' likewise omits the leaf count and is exact
//    only at I = 4;
//  - the PageRank column comes from an unnormalized damping-0.8 recursion on
//    the raw weights (no out-weight normalization, dangling mass dropped),
//    so it differs from the stochasticized PageRank by construction.
// Comparison output therefore reports absolute differences instead of
// asserting agreement (except for leaf scores and in-degrees, which are
// exact).
inline std::vector<ReferenceFormsRow> referenceClosedForms(double e0, double e1, double e2, Eigen::Index nodes) {
  if (nodes < 4 || nodes % 2 != 0) {
    throw InputError("a barrel needs an even node count of at least 4, got " + std::to_string(nodes));
  }
  for (double v : {e0, e1, e2}) {
    if (!std::isfinite(v) || v < 0.0 || v >= 1.0) {
      throw InputError("reference forms need edge effects in [0, 1), got " + std::to_string(v));
    }
  }
  const double n = static_cast<double>(nodes);
  const double hubDen = (1.0 - e0) * (1.0 - e0);
  const double prDen = n * (5.0 - 4.0 * e0);

  std::vector<ReferenceFormsRow> rows(4);
  rows[0] = {"hub1", (1.0 + e0 * (1.0 + e2) + e1) / hubDen, e0 + e1, e0, 1.0 / prDen};
  rows[1] = {"leaf1", 1.0, 0.0, e1, (5.0 - 4.0 * e0 + 4.0 * e1) / (5.0 * prDen)};
  rows[2] = {"hub2", (1.0 + e0 * (1.0 + e1) + e2) / hubDen, e0 + e2, e0, 1.0 / prDen};
  rows[3] = {"leaf2", 1.0, 0.0, e2, (5.0 - 4.0 * e0 + 4.0 * e2) / (5.0 * prDen)};
  return rows;
}

// One computed-vs-reference cell of the barrel comparison table.
struct CheckRow {
  std::string nodeClass;  // hub1 | leaf1 | hub2 | leaf2
  std::string measure;    // opinion-score | out-degree | in-degree | pagerank-0.8
  double computed = 0.0;
  double reference = 0.0;

  double absDiff() const { return std::abs(computed - reference); }
};

// Computed barrel analytics side by side with the closed-form reference
// expressions for the same edge effects.  The computed PageRank runs at
// damping 0.8 to match the reference column's damping; several cells still
// differ by construction (see referenceClosedForms), which is why the table
// reports absolute differences instead of asserting agreement.
inline std::vector<CheckRow> referenceComparison(const BarrelSpec& spec, double alphaHat, double budget) {
  const MultiplexNetwork net = buildBarrel(spec);
  const ModelParams params = uniformParams(net, alphaHat, budget);
  const EffectiveMatrix eff = effectiveMatrix(net, params);
  const WeightedDigraph graph = aggregate(net, params);
  const EdgeEffects e = edgeEffects(spec, alphaHat, budget);
  const std::vector<ReferenceFormsRow> ref = referenceClosedForms(e.hubHub, e.star1, e.star2, spec.nodes);

  const CentralityResult score = rawOpinionScore(eff);
  const CentralityResult outDeg = degreeCentrality(graph, DegreeMode::Out);
  const CentralityResult inDeg = degreeCentrality(graph, DegreeMode::In);
  const CentralityResult pr = pagerank(graph, 0.8);

  const Eigen::Index half = spec.nodes / 2;
  const Eigen::Index classIndex[4] = {0, 1, half, half + 1};
  std::vector<CheckRow> rows;
  rows.reserve(16);
  for (std::size_t k = 0; k < 4; ++k) {
    const Eigen::Index i = classIndex[k];
    rows.push_back({ref[k].nodeClass, "opinion-score", score.values[i], ref[k].opinionScore});
    rows.push_back({ref[k].nodeClass, "out-degree", outDeg.values[i], ref[k].outDegree});
    rows.push_back({ref[k].nodeClass, "in-degree", inDeg.values[i], ref[k].inDegree});
    rows.push_back({ref[k].nodeClass, "pagerank-0.8", pr.values[i], ref[k].pagerank});
  }
  return rows;
}

// One point of the intensity sweep: uniform alpha = alphaHat everywhere, the
// resulting budget split, and how far its shares sit from the uniform 1/I.
struct SweepRow {
  double alphaHat = 0.0;
  CentralityResult result;
  double hub1Share = 0.0;
  double leaf1Share = 0.0;
  double hub2Share = 0.0;
  double leaf2Share = 0.0;
  double maxShareDeviation = 0.0;
};

// Budget split across a ladder of uniform imitation intensities.  When gamma
// is not given it is resolved automatically once, at the first ladder value,
// and then held fixed: re-resolving per point would rescale the allocation
// along with the intensity and hide the drift toward the uniform split that
// the sweep exists to show.
inline std::vector<SweepRow> alphaSweep(const BarrelSpec& spec, double budget, std::optional<double> gamma,
                                        const std::vector<double>& alphaHats) {
  validateBarrelSpec(spec);
  if (alphaHats.empty()) {
    throw InputError("the intensity sweep needs at least one alpha value");
  }
  for (double a : alphaHats) {
    if (!(a > 0.0) || !std::isfinite(a)) {
      throw InputError("sweep alpha values must be positive");
    }
  }
  const MultiplexNetwork net = buildBarrel(spec);
  const Eigen::Index half = spec.nodes / 2;
  const double uniform = 1.0 / static_cast<double>(spec.nodes);

  std::optional<double> fixedGamma = gamma;
  std::vector<SweepRow> rows;
  rows.reserve(alphaHats.size());
  for (double a : alphaHats) {
    const ModelParams params = uniformParams(net, a, budget);
    CentralityResult r = opinionCentrality(net, params, fixedGamma);
    if (!fixedGamma) {
      fixedGamma = r.diagnostics.gammaUsed;
    }
    SweepRow row;
    row.alphaHat = a;
    const Eigen::VectorXd& shares = *r.budgetShares;
    row.hub1Share = shares[0];
    row.leaf1Share = shares[1];
    row.hub2Share = shares[half];
    row.leaf2Share = shares[half + 1];
    row.maxShareDeviation = (shares.array() - uniform).abs().maxCoeff();
    row.result = std::move(r);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace muxcent
