#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "muxcent/errors.hpp"
#include "muxcent/linalg.hpp"
#include "muxcent/multiplex.hpp"

namespace muxcent {

// Stationary mean opinion profile: solves (Id - Ebar) x = lambda / rate.
// Requires the contraction condition (all row sums of Ebar below 1).
inline Eigen::VectorXd fixedPoint(const EffectiveMatrix& eff, const Eigen::VectorXd& lambda) {
  if (lambda.size() != eff.size()) {
    throw InputError("lambda must have one rate per node");
  }
  if (lambda.size() > 0 && (!lambda.allFinite() || lambda.minCoeff() < 0.0)) {
    throw InputError("lambda rates must be finite and non-negative");
  }
  if (eff.maxRowSum() >= 1.0) {
    throw ConditionError("mean dynamics are not contracting: max influence row sum is " +
                         std::to_string(eff.maxRowSum()));
  }
  const Eigen::VectorXd rhs = lambda / eff.totalRate();
  return linalg::solveChecked(linalg::identityMinus(eff.matrix()), rhs, "fixed point");
}

struct SimulationSample {
  std::int64_t event = 0;
  Eigen::VectorXd state;
  Eigen::VectorXd runningMean;  // time-average of the state over events 1..event
};

struct SimulationResult {
  Eigen::VectorXd finalState;
  Eigen::VectorXd meanState;      // time-average over all events
  Eigen::VectorXd tailMeanState;  // time-average over the last half of the events
  std::vector<SimulationSample> samples;
  std::int64_t events = 0;
};

// Event-driven simulation of the opinion process.  Each step draws exactly
// one 53-bit uniform from a mt19937_64 stream (top bits, `(rng() >> 11) *
// 2^-53`) and picks the event by binary search in a fixed cumulative table:
// first the per-node external events in node order, then the (node, layer)
// imitation events with the layer index varying fastest.  The selected node
// blends toward the event's anchor with weight `delta` while every opinion,
// including its own past value, decays by (1 - delta).
inline SimulationResult simulate(const MultiplexNetwork& net, const ModelParams& params, double delta,
                                 Eigen::VectorXd x0, std::int64_t events, std::uint64_t seed,
                                 std::int64_t sampleEvery = 0) {
  const Eigen::Index n = net.nodeCount();
  if (n == 0) throw InputError("network has no nodes");
  if (!params.lambda) {
    throw InputError("simulation requires explicit per-node external rates");
  }
  validateParams(net, params);
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw InputError("delta must lie strictly between 0 and 1");
  }
  if (events < 1) {
    throw InputError("event count must be at least 1");
  }
  if (x0.size() == 0) {
    x0 = Eigen::VectorXd::Zero(n);
  }
  if (x0.size() != n) {
    throw InputError("initial opinions must have one value per node");
  }
  if (!x0.allFinite() || x0.minCoeff() < 0.0 || x0.maxCoeff() > 1.0) {
    throw InputError("initial opinions must lie in [0, 1]");
  }
  for (std::size_t c = 0; c < net.layerCount(); ++c) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double load = net.imitationLoad(i, c);
      if (load > 1.0 + 1e-9) {
        throw ConditionError("node '" + net.nodeIds()[static_cast<std::size_t>(i)] +
                             "' has total incoming imitation probability " + std::to_string(load) + " on layer '" +
                             net.layerIds()[c] + "'; the event process is only defined up to 1");
      }
    }
  }

  const auto layerCount = static_cast<Eigen::Index>(net.layerCount());
  const double rate = params.totalRate();

  // Cumulative event table: externals first, then (node, layer) pairs.
  std::vector<double> cum(static_cast<std::size_t>(n + n * layerCount));
  {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      acc += (*params.lambda)[i] / rate;
      cum[static_cast<std::size_t>(i)] = acc;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index c = 0; c < layerCount; ++c) {
        acc += params.alpha(i, c) / rate;
        cum[static_cast<std::size_t>(n + i * layerCount + c)] = acc;
      }
    }
  }

  std::mt19937_64 rng(seed);
  const double keep = 1.0 - delta;

  Eigen::VectorXd x = std::move(x0);
  Eigen::VectorXd sumAll = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd sumTail = Eigen::VectorXd::Zero(n);
  const std::int64_t tailStart = events / 2;  // events tailStart+1 .. events

  SimulationResult result;
  for (std::int64_t k = 1; k <= events; ++k) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    auto it = std::upper_bound(cum.begin(), cum.end(), u);
    if (it == cum.end()) --it;  // guard against cumulative rounding shortfall
    const auto idx = static_cast<Eigen::Index>(it - cum.begin());

    Eigen::Index node;
    double blended;
    if (idx < n) {
      node = idx;
      blended = x[node] * keep + delta;  // external push toward 1
    } else {
      const Eigen::Index t = idx - n;
      node = t / layerCount;
      const Eigen::Index c = t % layerCount;
      double pulled = 0.0;
      const auto& m = net.layer(static_cast<std::size_t>(c));
      for (SparseMatrix::InnerIterator in(m, node); in; ++in) {
        pulled += in.value() * x[in.row()];
      }
      blended = x[node] * keep + delta * pulled;
    }
    x *= keep;
    x[node] = blended;

    sumAll += x;
    if (k > tailStart) sumTail += x;
    if (sampleEvery > 0 && k % sampleEvery == 0) {
      result.samples.push_back({k, x, sumAll / static_cast<double>(k)});
    }
  }

  if (result.samples.empty() || result.samples.back().event != events) {
    result.samples.push_back({events, x, sumAll / static_cast<double>(events)});
  }
  result.finalState = x;
  result.meanState = sumAll / static_cast<double>(events);
  result.tailMeanState = sumTail / static_cast<double>(events - tailStart);
  result.events = events;
  return result;
}

struct OdeTrajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;

  const Eigen::VectorXd& finalState() const { return states.back(); }
};

// Explicit Euler integration of the mean dynamics
// dx/dt = lambda / rate + (Ebar - Id) x, recording every step.
inline OdeTrajectory integrateOde(const EffectiveMatrix& eff, const Eigen::VectorXd& lambda,
                                  const Eigen::VectorXd& x0, double tEnd, double dt) {
  if (lambda.size() != eff.size() || x0.size() != eff.size()) {
    throw InputError("lambda and initial state must have one entry per node");
  }
  if (!(dt > 0.0) || !std::isfinite(dt) || !(tEnd >= 0.0) || !std::isfinite(tEnd)) {
    throw InputError("time horizon must be non-negative and the step size positive");
  }
  if (eff.maxRowSum() >= 1.0) {
    throw ConditionError("mean dynamics are not contracting: max influence row sum is " +
                         std::to_string(eff.maxRowSum()));
  }
  const Eigen::VectorXd drive = lambda / eff.totalRate();
  const auto steps = static_cast<std::int64_t>(std::ceil(tEnd / dt - 1e-9));

  OdeTrajectory traj;
  traj.times.reserve(static_cast<std::size_t>(steps + 1));
  traj.states.reserve(static_cast<std::size_t>(steps + 1));
  Eigen::VectorXd x = x0;
  traj.times.push_back(0.0);
  traj.states.push_back(x);
  for (std::int64_t k = 1; k <= steps; ++k) {
    x += dt * (drive + eff.matrix() * x - x);
    if (!x.allFinite()) {
      throw NumericalError("Euler integration diverged at t = " + std::to_string(static_cast<double>(k) * dt));
    }
    traj.times.push_back(static_cast<double>(k) * dt);
    traj.states.push_back(x);
  }
  return traj;
}

}  // namespace muxcent
