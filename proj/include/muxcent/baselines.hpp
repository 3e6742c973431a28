#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>

#include "muxcent/errors.hpp"
#include "muxcent/multiplex.hpp"
#include "muxcent/result.hpp"

namespace muxcent {

// Classical centralities over the aggregated digraph.  They share the graph
// view so that comparisons against opinion centrality see exactly the same
// weighted structure.

enum class DegreeMode { In, Out, Total };

inline CentralityResult degreeCentrality(const WeightedDigraph& g, DegreeMode mode) {
  switch (mode) {
    case DegreeMode::In: return makeResult(g.inWeights());
    case DegreeMode::Out: return makeResult(g.outWeights());
    case DegreeMode::Total: return makeResult(g.inWeights() + g.outWeights());
  }
  throw InputError("unknown degree mode");
}

// Standard PageRank on the column-stochasticized weight matrix: each node
// spreads its rank over out-edges in proportion to their weight, dangling
// nodes spread uniformly, and everything is damped toward the uniform vector.
inline CentralityResult pagerank(const WeightedDigraph& g, double damping = 0.85, double tol = 1e-10,
                                 std::int64_t maxIters = 100000) {
  const Eigen::Index n = g.size();
  if (n == 0) throw InputError("graph has no nodes");
  if (!(damping > 0.0) || !(damping < 1.0)) {
    throw InputError("damping factor must lie strictly between 0 and 1");
  }
  const Eigen::VectorXd out = g.outWeights();
  const double uniform = 1.0 / static_cast<double>(n);

  Eigen::VectorXd p = Eigen::VectorXd::Constant(n, uniform);
  Eigen::VectorXd scaled(n);
  for (std::int64_t iter = 0; iter < maxIters; ++iter) {
    double dangling = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (out[i] > 0.0) {
        scaled[i] = p[i] / out[i];
      } else {
        scaled[i] = 0.0;
        dangling += p[i];
      }
    }
    Eigen::VectorXd next = damping * (g.weights().transpose() * scaled);
    next.array() += damping * dangling * uniform + (1.0 - damping) * uniform;
    const double change = (next - p).lpNorm<1>();
    p = std::move(next);
    if (change <= tol) {
      return makeResult(p);
    }
  }
  throw NumericalError("pagerank did not converge within " + std::to_string(maxIters) + " iterations");
}

// Right dominant eigenvector of W^T (incoming influence), power iteration
// with an identity shift so that eigenvalue pairs of equal magnitude (as in
// bipartite-like graphs) cannot make the iteration cycle.
inline CentralityResult eigenvectorCentrality(const WeightedDigraph& g, double tol = 1e-12,
                                              std::int64_t maxIters = 100000) {
  const Eigen::Index n = g.size();
  if (n == 0) throw InputError("graph has no nodes");
  const Eigen::VectorXd in = g.inWeights();
  if (in.maxCoeff() <= 0.0) {
    throw InputError("eigenvector centrality needs at least one edge");
  }
  const double shift = 0.5 * in.maxCoeff();

  Eigen::VectorXd x = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  for (std::int64_t iter = 0; iter < maxIters; ++iter) {
    Eigen::VectorXd y = g.weights().transpose() * x + shift * x;
    const double norm = y.norm();
    if (norm < 1e-300) {
      throw NumericalError("eigenvector iteration collapsed to the zero vector");
    }
    y /= norm;
    const double change = (y - x).norm();
    x = std::move(y);
    if (change <= tol) {
      return makeResult(x);
    }
  }
  throw NumericalError("eigenvector centrality did not converge within " + std::to_string(maxIters) + " iterations");
}

// Katz centrality with attenuation b: solves (Id - b W^T) x = 1, counting
// incoming walks of every length with geometric damping.
inline CentralityResult katzCentrality(const WeightedDigraph& g, double attenuation) {
  const Eigen::Index n = g.size();
  if (n == 0) throw InputError("graph has no nodes");
  if (!(attenuation > 0.0) || !std::isfinite(attenuation)) {
    throw InputError("attenuation must be positive");
  }
  // cheap spectral radius bound: min of max row / column weight sums
  const double radiusBound = std::min(g.outWeights().maxCoeff(), g.inWeights().maxCoeff());
  if (attenuation * radiusBound >= 1.0) {
    throw InputError("attenuation " + std::to_string(attenuation) + " is too large: the walk series diverges once "
                     "attenuation * spectral radius reaches 1 (bound " + std::to_string(radiusBound) + ")");
  }
  SparseMatrix wt = SparseMatrix(g.weights().transpose());
  wt *= attenuation;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  return makeResult(linalg::solveChecked(linalg::identityMinus(wt), ones, "katz centrality"));
}

struct HitsResult {
  CentralityResult hubs;
  CentralityResult authorities;
};

// Alternating hub/authority iteration; equivalent to power iteration on the
// positive semi-definite Gram matrices, so no shift is needed.
inline HitsResult hits(const WeightedDigraph& g, double tol = 1e-12, std::int64_t maxIters = 100000) {
  const Eigen::Index n = g.size();
  if (n == 0) throw InputError("graph has no nodes");
  if (g.inWeights().maxCoeff() <= 0.0) {
    throw InputError("hits needs at least one edge");
  }

  Eigen::VectorXd hub = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  Eigen::VectorXd auth = hub;
  for (std::int64_t iter = 0; iter < maxIters; ++iter) {
    Eigen::VectorXd nextAuth = g.weights().transpose() * hub;
    double norm = nextAuth.norm();
    if (norm < 1e-300) throw NumericalError("hits authority vector collapsed to zero");
    nextAuth /= norm;

    Eigen::VectorXd nextHub = g.weights() * nextAuth;
    norm = nextHub.norm();
    if (norm < 1e-300) throw NumericalError("hits hub vector collapsed to zero");
    nextHub /= norm;

    const double change = std::max((nextAuth - auth).norm(), (nextHub - hub).norm());
    auth = std::move(nextAuth);
    hub = std::move(nextHub);
    if (change <= tol) {
      return {makeResult(hub), makeResult(auth)};
    }
  }
  throw NumericalError("hits did not converge within " + std::to_string(maxIters) + " iterations");
}

}  // namespace muxcent
