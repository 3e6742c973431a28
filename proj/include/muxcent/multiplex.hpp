#pragma once

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "muxcent/errors.hpp"
#include "muxcent/linalg.hpp"

namespace muxcent {

using linalg::SparseMatrix;

// One directed imitation edge: `target` imitates `source` with the given
// probability when an imitation event fires for `target` on `layer`.
struct EdgeRecord {
  std::string source;
  std::string target;
  std::string layer;
  double weight = 0.0;
  int line = 0;  // 1-based source line when parsed from a file, 0 otherwise
};

// How to treat a node whose total incoming imitation probability on one layer
// exceeds 1.
enum class NormalizationMode {
  Strict,      // reject the input
  Cap,         // scale that node/layer group down to sum exactly 1
  Stochastic,  // scale every node/layer group with positive mass to sum 1
};

inline const char* normalizationModeName(NormalizationMode mode) {
  switch (mode) {
    case NormalizationMode::Strict: return "strict";
    case NormalizationMode::Cap: return "cap";
    case NormalizationMode::Stochastic: return "stochastic";
  }
  return "?";
}

inline std::optional<NormalizationMode> parseNormalizationMode(const std::string& name) {
  if (name == "strict") return NormalizationMode::Strict;
  if (name == "cap") return NormalizationMode::Cap;
  if (name == "stochastic") return NormalizationMode::Stochastic;
  return std::nullopt;
}

// A node- and layer-labelled stack of imitation probability matrices.
// Layer matrix entry (i, j) is the probability that node j copies node i's
// opinion when one of j's imitation events fires on that layer, so column j
// holds everything node j listens to.
class MultiplexNetwork {
 public:
  MultiplexNetwork(std::vector<std::string> nodeIds, std::vector<std::string> layerIds,
                   std::vector<SparseMatrix> layers)
      : nodeIds_(std::move(nodeIds)), layerIds_(std::move(layerIds)), layers_(std::move(layers)) {
    const auto n = static_cast<Eigen::Index>(nodeIds_.size());
    if (layers_.size() != layerIds_.size()) {
      throw InputError("layer matrix count does not match layer id count");
    }
    {
      auto sortedCheck = [](std::vector<std::string> ids, const char* what) {
        std::sort(ids.begin(), ids.end());
        if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
          throw InputError(std::string("duplicate ") + what + " id");
        }
      };
      sortedCheck(nodeIds_, "node");
      sortedCheck(layerIds_, "layer");
    }
    for (std::size_t c = 0; c < layers_.size(); ++c) {
      auto& m = layers_[c];
      if (m.rows() != n || m.cols() != n) {
        throw InputError("layer '" + layerIds_[c] + "' matrix size does not match node count");
      }
      m.makeCompressed();
      for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
          if (!std::isfinite(it.value()) || it.value() < 0.0 || it.value() > 1.0 + 1e-12) {
            throw InputError("layer '" + layerIds_[c] + "' has an imitation probability outside [0, 1] for " +
                             nodeIds_[static_cast<std::size_t>(it.col())] + " <- " +
                             nodeIds_[static_cast<std::size_t>(it.row())]);
          }
          if (it.row() == it.col() && it.value() != 0.0) {
            throw InputError("node '" + nodeIds_[static_cast<std::size_t>(it.row())] + "' imitates itself on layer '" +
                             layerIds_[c] + "'");
          }
        }
      }
    }
  }

  Eigen::Index nodeCount() const { return static_cast<Eigen::Index>(nodeIds_.size()); }
  std::size_t layerCount() const { return layers_.size(); }

  const SparseMatrix& layer(std::size_t c) const { return layers_.at(c); }
  const std::vector<SparseMatrix>& layers() const { return layers_; }
  const std::vector<std::string>& nodeIds() const { return nodeIds_; }
  const std::vector<std::string>& layerIds() const { return layerIds_; }

  // Total incoming imitation probability of `node` on layer `c`
  // (column sum).  Must stay <= 1 for the event dynamics to be well defined.
  double imitationLoad(Eigen::Index node, std::size_t c) const { return layers_.at(c).col(node).sum(); }

 private:
  std::vector<std::string> nodeIds_;
  std::vector<std::string> layerIds_;
  std::vector<SparseMatrix> layers_;
};

// Assembles a network from edge records.  Node and layer indices follow first
// appearance order (an edge introduces its source before its target), which
// also fixes tie-breaking order everywhere downstream.
inline MultiplexNetwork buildNetwork(const std::vector<EdgeRecord>& edges,
                                     NormalizationMode mode = NormalizationMode::Cap) {
  std::vector<std::string> nodeIds;
  std::vector<std::string> layerIds;
  std::unordered_map<std::string, Eigen::Index> nodeIndex;
  std::unordered_map<std::string, std::size_t> layerIndex;
  auto nodeIdx = [&](const std::string& id) {
    auto [it, inserted] = nodeIndex.try_emplace(id, static_cast<Eigen::Index>(nodeIds.size()));
    if (inserted) nodeIds.push_back(id);
    return it->second;
  };
  auto layerIdx = [&](const std::string& id) {
    auto [it, inserted] = layerIndex.try_emplace(id, layerIds.size());
    if (inserted) layerIds.push_back(id);
    return it->second;
  };

  auto where = [](const EdgeRecord& e) {
    return e.line > 0 ? " (line " + std::to_string(e.line) + ")" : std::string();
  };

  // Accumulate weights; repeated (source, target, layer) triples add up.
  std::vector<std::map<std::pair<Eigen::Index, Eigen::Index>, double>> entries;
  for (const auto& e : edges) {
    if (e.source.empty() || e.target.empty() || e.layer.empty()) {
      throw InputError("edge with empty node or layer id" + where(e));
    }
    if (!std::isfinite(e.weight) || e.weight < 0.0) {
      throw InputError("edge " + e.source + " -> " + e.target + " on layer '" + e.layer +
                       "' has an invalid weight" + where(e));
    }
    if (e.source == e.target) {
      throw InputError("node '" + e.source + "' imitates itself on layer '" + e.layer + "'" + where(e));
    }
    const Eigen::Index u = nodeIdx(e.source);
    const Eigen::Index v = nodeIdx(e.target);
    const std::size_t c = layerIdx(e.layer);
    if (c >= entries.size()) entries.resize(c + 1);
    entries[c][{u, v}] += e.weight;
  }

  const auto n = static_cast<Eigen::Index>(nodeIds.size());
  std::vector<SparseMatrix> layers;
  layers.reserve(entries.size());
  for (std::size_t c = 0; c < entries.size(); ++c) {
    // Incoming mass per imitator on this layer decides normalization.
    std::unordered_map<Eigen::Index, double> load;
    for (const auto& [key, w] : entries[c]) load[key.second] += w;

    std::unordered_map<Eigen::Index, double> scale;
    for (const auto& [v, sum] : load) {
      switch (mode) {
        case NormalizationMode::Strict:
          if (sum > 1.0 + 1e-9) {
            throw ConditionError("node '" + nodeIds[static_cast<std::size_t>(v)] +
                                 "' receives total imitation probability " + std::to_string(sum) + " on layer '" +
                                 layerIds[c] + "', which exceeds 1");
          }
          break;
        case NormalizationMode::Cap:
          if (sum > 1.0) scale[v] = 1.0 / sum;
          break;
        case NormalizationMode::Stochastic:
          if (sum > 0.0) scale[v] = 1.0 / sum;
          break;
      }
    }

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(entries[c].size());
    for (const auto& [key, w] : entries[c]) {
      double value = w;
      if (auto it = scale.find(key.second); it != scale.end()) value *= it->second;
      if (value != 0.0) triplets.emplace_back(key.first, key.second, value);
    }
    SparseMatrix m(n, n);
    m.setFromTriplets(triplets.begin(), triplets.end());
    layers.push_back(std::move(m));
  }
  layers.resize(layerIds.size(), SparseMatrix(n, n));

  return MultiplexNetwork(std::move(nodeIds), std::move(layerIds), std::move(layers));
}

// Model rates attached to a network: per-node, per-layer imitation
// intensities alpha, and either explicit per-node external intensities lambda
// or just their planned total (the budget) when the split is what we solve
// for.
struct ModelParams {
  Eigen::MatrixXd alpha;
  std::optional<Eigen::VectorXd> lambda;
  double budget = 1.0;

  double totalExternal() const { return lambda ? lambda->sum() : budget; }
  double totalRate() const { return totalExternal() + (alpha.size() > 0 ? alpha.sum() : 0.0); }
};

// Same imitation intensity everywhere; the common case in experiments.
inline ModelParams uniformParams(const MultiplexNetwork& net, double alphaHat, double budget) {
  ModelParams p;
  p.alpha = Eigen::MatrixXd::Constant(net.nodeCount(), static_cast<Eigen::Index>(net.layerCount()), alphaHat);
  p.budget = budget;
  return p;
}

inline void validateParams(const MultiplexNetwork& net, const ModelParams& params) {
  if (params.alpha.rows() != net.nodeCount() ||
      params.alpha.cols() != static_cast<Eigen::Index>(net.layerCount())) {
    throw InputError("alpha must be one intensity per node and layer (expected " + std::to_string(net.nodeCount()) +
                     " x " + std::to_string(net.layerCount()) + ", got " + std::to_string(params.alpha.rows()) + " x " +
                     std::to_string(params.alpha.cols()) + ")");
  }
  if (params.alpha.size() > 0 && (!params.alpha.allFinite() || params.alpha.minCoeff() < 0.0)) {
    throw InputError("alpha intensities must be finite and non-negative");
  }
  if (params.lambda) {
    if (params.lambda->size() != net.nodeCount()) {
      throw InputError("lambda must have one rate per node");
    }
    if (params.lambda->size() > 0 && (!params.lambda->allFinite() || params.lambda->minCoeff() < 0.0)) {
      throw InputError("lambda rates must be finite and non-negative");
    }
  } else {
    if (!std::isfinite(params.budget) || params.budget < 0.0) {
      throw InputError("budget must be finite and non-negative");
    }
  }
  if (params.totalRate() <= 0.0) {
    throw InputError("total event rate is zero; nothing can ever happen");
  }
}

// The one-step influence matrix of the mean dynamics.  Entry (i, j) is the
// expected pull of node j's opinion on node i per unit time, divided by the
// total event rate: sum over layers of alpha(i, c) * layerC(j, i) / rate.
// Row sums stay below 1 whenever per-layer imitation loads do, which is what
// keeps the dynamics contracting.
class EffectiveMatrix {
 public:
  EffectiveMatrix(SparseMatrix matrix, double totalRate) : matrix_(std::move(matrix)), totalRate_(totalRate) {
    matrix_.makeCompressed();
    rowSums_ = Eigen::VectorXd::Zero(matrix_.rows());
    for (int k = 0; k < matrix_.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(matrix_, k); it; ++it) {
        rowSums_[it.row()] += it.value();
      }
    }
  }

  const SparseMatrix& matrix() const { return matrix_; }
  double totalRate() const { return totalRate_; }
  Eigen::Index size() const { return matrix_.rows(); }
  const Eigen::VectorXd& rowSums() const { return rowSums_; }
  double maxRowSum() const { return rowSums_.size() > 0 ? rowSums_.maxCoeff() : 0.0; }

 private:
  SparseMatrix matrix_;
  double totalRate_;
  Eigen::VectorXd rowSums_;
};

inline EffectiveMatrix effectiveMatrix(const MultiplexNetwork& net, const ModelParams& params) {
  if (net.nodeCount() == 0) {
    throw InputError("network has no nodes");
  }
  validateParams(net, params);
  const double rate = params.totalRate();
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t c = 0; c < net.layerCount(); ++c) {
    const auto& m = net.layer(c);
    for (int k = 0; k < m.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
        // layer entry (j, i): i imitates j, so j pulls on i with i's intensity
        const Eigen::Index j = it.row();
        const Eigen::Index i = it.col();
        const double a = params.alpha(i, static_cast<Eigen::Index>(c));
        if (a != 0.0 && it.value() != 0.0) {
          triplets.emplace_back(i, j, a * it.value() / rate);
        }
      }
    }
  }
  SparseMatrix ebar(net.nodeCount(), net.nodeCount());
  ebar.setFromTriplets(triplets.begin(), triplets.end());
  return EffectiveMatrix(std::move(ebar), rate);
}

// Stability check results for the mean dynamics.  Both views of the spectral
// condition are reported: the top eigenvalue of the symmetric part of the
// influence matrix (must stay below 1) and the same quantity shifted by the
// identity (must stay below 0).
struct ConditionReport {
  double maxRowSum = 0.0;
  Eigen::Index worstRow = -1;
  bool rowSumsOk = true;
  double symTopEigenvalue = 0.0;
  double shiftedSymTopEigenvalue = -1.0;
  bool eigenvalueOk = true;
  bool ok = true;
};

inline ConditionReport validateConditions(const EffectiveMatrix& eff) {
  ConditionReport report;
  report.maxRowSum = eff.maxRowSum();
  if (eff.size() > 0) {
    Eigen::Index worst = 0;
    eff.rowSums().maxCoeff(&worst);
    report.worstRow = worst;
  }
  report.rowSumsOk = report.maxRowSum < 1.0;
  report.symTopEigenvalue = linalg::symPartTopEigenvalue(eff.matrix());
  report.shiftedSymTopEigenvalue = report.symTopEigenvalue - 1.0;
  report.eigenvalueOk = report.symTopEigenvalue < 1.0;
  report.ok = report.rowSumsOk && report.eigenvalueOk;
  return report;
}

// Single-layer digraph view used by classical centralities: edge i -> j
// carries the rate-weighted imitation of i by j, summed over layers.  By
// construction this is the transpose of the effective influence matrix.
class WeightedDigraph {
 public:
  explicit WeightedDigraph(SparseMatrix weights) : weights_(std::move(weights)) {
    if (weights_.rows() != weights_.cols()) {
      throw InputError("digraph weight matrix must be square");
    }
    weights_.makeCompressed();
    for (int k = 0; k < weights_.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(weights_, k); it; ++it) {
        if (!std::isfinite(it.value()) || it.value() < 0.0) {
          throw InputError("digraph weights must be finite and non-negative");
        }
      }
    }
  }

  Eigen::Index size() const { return weights_.rows(); }
  const SparseMatrix& weights() const { return weights_; }

  Eigen::VectorXd outWeights() const {
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(weights_.rows());
    for (int k = 0; k < weights_.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(weights_, k); it; ++it) sums[it.row()] += it.value();
    }
    return sums;
  }

  Eigen::VectorXd inWeights() const {
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(weights_.cols());
    for (int k = 0; k < weights_.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(weights_, k); it; ++it) sums[it.col()] += it.value();
    }
    return sums;
  }

 private:
  SparseMatrix weights_;
};

// Collapses the layers into one digraph: edge i -> j gets weight
// alpha(j, c) * layerC(i, j) / rate summed over layers c, i.e. how strongly j
// listens to i relative to the whole event stream.
inline WeightedDigraph aggregate(const MultiplexNetwork& net, const ModelParams& params) {
  if (net.nodeCount() == 0) {
    throw InputError("network has no nodes");
  }
  validateParams(net, params);
  const double rate = params.totalRate();
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t c = 0; c < net.layerCount(); ++c) {
    const auto& m = net.layer(c);
    for (int k = 0; k < m.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
        const double a = params.alpha(it.col(), static_cast<Eigen::Index>(c));
        if (a != 0.0 && it.value() != 0.0) {
          triplets.emplace_back(it.row(), it.col(), a * it.value() / rate);
        }
      }
    }
  }
  SparseMatrix w(net.nodeCount(), net.nodeCount());
  w.setFromTriplets(triplets.begin(), triplets.end());
  return WeightedDigraph(std::move(w));
}

}  // namespace muxcent
