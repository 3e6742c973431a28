#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "muxcent/errors.hpp"
#include "muxcent/multiplex.hpp"

namespace muxcent {

namespace detail {

// 53-bit uniform in [0, 1), same convention as the simulator.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

// Random multiplex network for property tests and benchmarks: per layer,
// every ordered pair becomes an edge independently with probability
// expectedDegree / (I - 1) (so each node's expected in-degree per layer is
// expectedDegree), weights uniform in (0, 1), then cap normalization per
// imitator — which makes the result strictly valid by construction.  Pair
// enumeration uses geometric gap sampling, so the cost is proportional to
// the number of edges drawn, not to I^2.  Nodes are "n0".."n<I-1>", layers
// "L1".."LC".
inline MultiplexNetwork randomStrictNetwork(Eigen::Index nodes, std::size_t layers, double expectedDegree,
                                            std::mt19937_64& rng) {
  if (nodes < 1) throw InputError("network needs at least one node");
  if (expectedDegree < 0.0 || !std::isfinite(expectedDegree)) {
    throw InputError("expected degree must be finite and non-negative");
  }
  const double p = nodes > 1 ? std::min(1.0, expectedDegree / static_cast<double>(nodes - 1)) : 0.0;

  std::vector<SparseMatrix> matrices;
  matrices.reserve(layers);
  std::vector<Eigen::Triplet<double>> triplets;
  Eigen::VectorXd load(nodes);
  for (std::size_t c = 0; c < layers; ++c) {
    triplets.clear();
    load.setZero();
    for (Eigen::Index v = 0; v < nodes; ++v) {
      // walk the candidate influencers of v (positions skip v itself)
      Eigen::Index pos = -1;
      while (p > 0.0) {
        if (p >= 1.0) {
          ++pos;
        } else {
          double u01 = detail::uniform01(rng);
          if (u01 <= 0.0) u01 = 0x1.0p-53;
          pos += 1 + static_cast<Eigen::Index>(std::floor(std::log(u01) / std::log1p(-p)));
        }
        if (pos >= nodes - 1) break;
        const Eigen::Index u = pos < v ? pos : pos + 1;
        double w = detail::uniform01(rng);
        if (w == 0.0) w = 0x1.0p-53;
        triplets.emplace_back(u, v, w);
        load[v] += w;
      }
    }
    // cap: rescale any imitator whose incoming mass exceeds 1
    for (auto& t : triplets) {
      if (load[t.col()] > 1.0) {
        t = {static_cast<int>(t.row()), static_cast<int>(t.col()), t.value() / load[t.col()]};
      }
    }
    SparseMatrix m(nodes, nodes);
    m.setFromTriplets(triplets.begin(), triplets.end());
    matrices.push_back(std::move(m));
  }

  std::vector<std::string> nodeIds;
  nodeIds.reserve(static_cast<std::size_t>(nodes));
  for (Eigen::Index i = 0; i < nodes; ++i) nodeIds.push_back("n" + std::to_string(i));
  std::vector<std::string> layerIds;
  layerIds.reserve(layers);
  for (std::size_t c = 0; c < layers; ++c) layerIds.push_back("L" + std::to_string(c + 1));
  return MultiplexNetwork(std::move(nodeIds), std::move(layerIds), std::move(matrices));
}

// Uniform random intensities in [lo, hi], one per node and layer.
inline Eigen::MatrixXd randomAlpha(Eigen::Index nodes, std::size_t layers, double lo, double hi,
                                   std::mt19937_64& rng) {
  if (!(hi >= lo) || lo < 0.0) {
    throw InputError("alpha range must satisfy 0 <= lo <= hi");
  }
  Eigen::MatrixXd alpha(nodes, static_cast<Eigen::Index>(layers));
  for (Eigen::Index i = 0; i < nodes; ++i) {
    for (Eigen::Index c = 0; c < alpha.cols(); ++c) {
      alpha(i, c) = lo + (hi - lo) * detail::uniform01(rng);
    }
  }
  return alpha;
}

}  // namespace muxcent
