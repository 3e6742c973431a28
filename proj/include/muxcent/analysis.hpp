#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "muxcent/baselines.hpp"
#include "muxcent/errors.hpp"
#include "muxcent/multiplex.hpp"
#include "muxcent/opinion.hpp"
#include "muxcent/ranks.hpp"
#include "muxcent/result.hpp"
#include "muxcent/synthetic.hpp"

namespace muxcent {

// Spearman rank correlation: Pearson correlation of fractional ranks, which
// handles ties correctly.  Returns nothing when either input has zero rank
// variance (all values tied) — the coefficient is undefined there, and
// callers are expected to report that rather than guess.
inline std::optional<double> spearman(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) {
    throw InputError("spearman needs two equal-length value vectors");
  }
  if (x.size() < 2) {
    throw InputError("spearman needs at least two observations");
  }
  if (!x.allFinite() || !y.allFinite()) {
    throw InputError("spearman needs finite values");
  }
  const Eigen::VectorXd rx = fractionalRanks(x);
  const Eigen::VectorXd ry = fractionalRanks(y);
  const Eigen::VectorXd cx = rx.array() - rx.mean();
  const Eigen::VectorXd cy = ry.array() - ry.mean();
  const double vx = cx.squaredNorm();
  const double vy = cy.squaredNorm();
  if (vx == 0.0 || vy == 0.0) {
    return std::nullopt;
  }
  // One combined square root instead of sqrt(vx)*sqrt(vy): with exactly
  // representable rank variances, perfectly (anti-)aligned ranks then divide
  // out to exactly +/-1 instead of landing one rounding away.
  return std::clamp(cx.dot(cy) / std::sqrt(vx * vy), -1.0, 1.0);
}

// One node's movement between two rankings.
struct RankDifferenceRow {
  Eigen::Index node = 0;
  double valueA = 0.0;  // measure-a value; the table is ordered by it, ascending
  double rankA = 0.0;
  double rankB = 0.0;
  double delta = 0.0;  // rankA - rankB, divided by (n - 1) when normalized
};

// Per-node rank movement from measure a to measure b.  With `topK`, only the
// k most central nodes under a are kept (smallest rank, ties broken by
// index).  Rows come back ordered by ascending a-value.
inline std::vector<RankDifferenceRow> rankDifference(const CentralityResult& a, const CentralityResult& b,
                                                     bool normalize, std::optional<Eigen::Index> topK = std::nullopt) {
  const Eigen::Index n = a.values.size();
  if (b.values.size() != n) {
    throw InputError("rank difference needs results over the same node set");
  }
  std::vector<Eigen::Index> picked(static_cast<std::size_t>(n));
  std::iota(picked.begin(), picked.end(), Eigen::Index{0});
  if (topK) {
    if (*topK < 1) throw InputError("top-k must be at least 1");
    std::stable_sort(picked.begin(), picked.end(),
                     [&](Eigen::Index u, Eigen::Index v) { return a.ranks[u] < a.ranks[v]; });
    picked.resize(static_cast<std::size_t>(std::min<Eigen::Index>(*topK, n)));
  }
  std::stable_sort(picked.begin(), picked.end(),
                   [&](Eigen::Index u, Eigen::Index v) { return a.values[u] < a.values[v]; });

  const double scale = normalize && n > 1 ? static_cast<double>(n - 1) : 1.0;
  std::vector<RankDifferenceRow> rows;
  rows.reserve(picked.size());
  for (Eigen::Index i : picked) {
    rows.push_back({i, a.values[i], a.ranks[i], b.ranks[i], (a.ranks[i] - b.ranks[i]) / scale});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Measure registry shared by the comparison pipeline, the benchmark, and the
// CLI.

enum class MeasureKind {
  Opinion,
  OpinionExactGamma,  // like Opinion but gamma always from the dense exact bound (capacity-limited)
  Naive,
  InDegree,
  OutDegree,
  TotalDegree,
  PageRank,
  Eigenvector,
  Katz,
  HitsHub,
  HitsAuthority,
};

inline const std::vector<std::pair<std::string, MeasureKind>>& measureRegistry() {
  static const std::vector<std::pair<std::string, MeasureKind>> registry = {
      {"opinion", MeasureKind::Opinion},
      {"opinion-exact-gamma", MeasureKind::OpinionExactGamma},
      {"naive", MeasureKind::Naive},
      {"in-degree", MeasureKind::InDegree},
      {"out-degree", MeasureKind::OutDegree},
      {"total-degree", MeasureKind::TotalDegree},
      {"pagerank", MeasureKind::PageRank},
      {"eigenvector", MeasureKind::Eigenvector},
      {"katz", MeasureKind::Katz},
      {"hits-hub", MeasureKind::HitsHub},
      {"hits-authority", MeasureKind::HitsAuthority},
  };
  return registry;
}

inline MeasureKind parseMeasure(const std::string& name) {
  for (const auto& [n, kind] : measureRegistry()) {
    if (n == name) return kind;
  }
  std::string known;
  for (const auto& [n, kind] : measureRegistry()) {
    if (!known.empty()) known += ", ";
    known += n;
  }
  throw InputError("unknown measure '" + name + "' (known: " + known + ")");
}

// Everything a single measure evaluation may need; built once per graph.
struct MeasureContext {
  const MultiplexNetwork* net = nullptr;
  const EffectiveMatrix* eff = nullptr;
  const WeightedDigraph* graph = nullptr;
  double budget = 1.0;
  std::optional<double> gamma;  // empty = automatic
  Eigen::Index denseCap = kDenseGammaCap;
  double damping = 0.85;
  std::optional<double> katzAttenuation;  // empty = 0.85 / spectral radius bound
};

inline double defaultKatzAttenuation(const WeightedDigraph& g) {
  const double bound = std::min(g.outWeights().maxCoeff(), g.inWeights().maxCoeff());
  return bound > 0.0 ? 0.85 / bound : 0.85;
}

inline CentralityResult computeMeasure(MeasureKind kind, const MeasureContext& ctx) {
  switch (kind) {
    case MeasureKind::Opinion:
      return opinionCentrality(*ctx.eff, ctx.budget, ctx.gamma, ctx.denseCap);
    case MeasureKind::OpinionExactGamma: {
      const GammaBound bound = gammaPositivityBound(*ctx.eff, ctx.budget, ctx.denseCap);
      const double g = bound.value > 0.0 ? 2.0 * bound.value : 1.0;
      return opinionCentrality(*ctx.eff, ctx.budget, g, ctx.denseCap);
    }
    case MeasureKind::Naive:
      return naiveOpinionCentrality(*ctx.eff, ctx.budget, ctx.net ? &ctx.net->nodeIds() : nullptr);
    case MeasureKind::InDegree:
      return degreeCentrality(*ctx.graph, DegreeMode::In);
    case MeasureKind::OutDegree:
      return degreeCentrality(*ctx.graph, DegreeMode::Out);
    case MeasureKind::TotalDegree:
      return degreeCentrality(*ctx.graph, DegreeMode::Total);
    case MeasureKind::PageRank:
      return pagerank(*ctx.graph, ctx.damping);
    case MeasureKind::Eigenvector:
      return eigenvectorCentrality(*ctx.graph);
    case MeasureKind::Katz:
      return katzCentrality(*ctx.graph, ctx.katzAttenuation ? *ctx.katzAttenuation : defaultKatzAttenuation(*ctx.graph));
    case MeasureKind::HitsHub:
      return hits(*ctx.graph).hubs;
    case MeasureKind::HitsAuthority:
      return hits(*ctx.graph).authorities;
  }
  throw InputError("unknown measure kind");
}

// ---------------------------------------------------------------------------
// Comparison pipeline.

struct MeasureOutcome {
  std::string name;
  std::optional<CentralityResult> result;  // empty on failure or skip
  double seconds = 0.0;
  std::string status = "ok";  // ok | failed | skipped
  std::string note;           // failure message or skip reason
  std::optional<double> rhoVsOpinion;
  bool rhoUndefined = false;  // rho vs opinion computed but undefined (zero rank variance)
};

struct ComparisonReport {
  std::vector<MeasureOutcome> outcomes;
  // full pairwise Spearman matrix over the outcomes (empty cell = either
  // measure failed/skipped, or the coefficient is undefined)
  std::vector<std::vector<std::optional<double>>> rho;
  // per-node rank movement, opinion vs. each other computed measure
  std::vector<std::pair<std::string, std::vector<RankDifferenceRow>>> rankDifferences;
  std::vector<std::string> notes;
};

// Runs every requested measure once over the same network, recording wall
// time, the pairwise Spearman matrix, and the opinion-vs-baseline rank
// movements.  A failing measure fills its cells with nulls instead of
// sinking the report.  In/out-degree are skipped with a notice when the
// aggregated graph is symmetric (the direction carries no information).
inline ComparisonReport compareMeasures(const MultiplexNetwork& net, const ModelParams& params,
                                        const std::vector<std::string>& measureNames,
                                        std::optional<double> gamma = std::nullopt,
                                        std::optional<Eigen::Index> topK = std::nullopt, double damping = 0.85,
                                        std::optional<double> katzAttenuation = std::nullopt,
                                        Eigen::Index denseCap = kDenseGammaCap) {
  if (measureNames.empty()) {
    throw InputError("no measures requested");
  }
  std::vector<MeasureKind> kinds;
  kinds.reserve(measureNames.size());
  for (const auto& name : measureNames) kinds.push_back(parseMeasure(name));

  const EffectiveMatrix eff = effectiveMatrix(net, params);
  const WeightedDigraph graph = aggregate(net, params);

  MeasureContext ctx;
  ctx.net = &net;
  ctx.eff = &eff;
  ctx.graph = &graph;
  ctx.budget = params.lambda ? params.lambda->sum() : params.budget;
  ctx.gamma = gamma;
  ctx.damping = damping;
  ctx.katzAttenuation = katzAttenuation;
  ctx.denseCap = denseCap;

  SparseMatrix asym = SparseMatrix(graph.weights().transpose()) - graph.weights();
  const bool symmetric =
      asym.nonZeros() == 0 ||
      Eigen::Map<const Eigen::VectorXd>(asym.valuePtr(), asym.nonZeros()).cwiseAbs().maxCoeff() <= 1e-12;

  ComparisonReport report;
  for (std::size_t m = 0; m < kinds.size(); ++m) {
    MeasureOutcome outcome;
    outcome.name = measureNames[m];
    if (symmetric && (kinds[m] == MeasureKind::InDegree || kinds[m] == MeasureKind::OutDegree)) {
      outcome.status = "skipped";
      outcome.note = "undirected input: in/out-degree carry no direction information";
      report.outcomes.push_back(std::move(outcome));
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    try {
      outcome.result = computeMeasure(kinds[m], ctx);
    } catch (const Error& e) {
      outcome.status = "failed";
      outcome.note = e.what();
    }
    outcome.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.outcomes.push_back(std::move(outcome));
  }

  // pairwise Spearman matrix
  const std::size_t count = report.outcomes.size();
  report.rho.assign(count, std::vector<std::optional<double>>(count));
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < count; ++j) {
      if (report.outcomes[i].result && report.outcomes[j].result && net.nodeCount() >= 2) {
        report.rho[i][j] = spearman(report.outcomes[i].result->values, report.outcomes[j].result->values);
      }
    }
  }

  // opinion row: correlations and rank movements against every other measure
  std::optional<std::size_t> opinionIdx;
  for (std::size_t i = 0; i < count; ++i) {
    if (kinds[i] == MeasureKind::Opinion && report.outcomes[i].result) {
      opinionIdx = i;
      break;
    }
  }
  if (opinionIdx) {
    for (std::size_t j = 0; j < count; ++j) {
      if (j == *opinionIdx || !report.outcomes[j].result) continue;
      report.outcomes[j].rhoVsOpinion = report.rho[*opinionIdx][j];
      report.outcomes[j].rhoUndefined = !report.rho[*opinionIdx][j].has_value();
      report.rankDifferences.emplace_back(
          report.outcomes[j].name,
          rankDifference(*report.outcomes[*opinionIdx].result, *report.outcomes[j].result, true, topK));
    }
  } else {
    report.notes.push_back("opinion measure not computed; correlation section left empty");
  }
  if (symmetric) {
    report.notes.push_back("aggregated graph is symmetric (undirected)");
  }
  return report;
}

// ---------------------------------------------------------------------------
// Timing benchmark on synthetic networks.

struct BenchmarkCell {
  Eigen::Index nodes = 0;
  std::string measure;
  std::optional<double> medianSeconds;
  std::string note;  // "capacity" or an error message when no timing exists
};

struct BenchmarkOptions {
  std::size_t layers = 2;
  double expectedDegree = 8.0;
  int repetitions = 3;
  double budget = 1.0;
  double alphaHat = 1.0;
  std::uint64_t seed = 1;
  Eigen::Index denseCap = kDenseGammaCap;
};

// Times each measure on one synthetic network per size and reports the
// median over the repetitions.  Capacity refusals (e.g. the exact-bound
// opinion variant on a network too large for a dense inverse) mark their
// cell instead of aborting the run.  Paths are single-threaded so the curves
// stay comparable.
inline std::vector<BenchmarkCell> benchmark(const std::vector<Eigen::Index>& sizes,
                                            const std::vector<std::string>& measureNames,
                                            const BenchmarkOptions& opts = {}) {
  if (sizes.empty()) throw InputError("benchmark needs at least one size");
  if (measureNames.empty()) throw InputError("benchmark needs at least one measure");
  if (opts.repetitions < 1) throw InputError("repetitions must be at least 1");
  std::vector<MeasureKind> kinds;
  for (const auto& name : measureNames) kinds.push_back(parseMeasure(name));

  std::vector<BenchmarkCell> cells;
  for (const Eigen::Index size : sizes) {
    std::mt19937_64 rng(opts.seed + static_cast<std::uint64_t>(size));
    const MultiplexNetwork net = randomStrictNetwork(size, opts.layers, opts.expectedDegree, rng);
    const ModelParams params = uniformParams(net, opts.alphaHat, opts.budget);
    const EffectiveMatrix eff = effectiveMatrix(net, params);
    const WeightedDigraph graph = aggregate(net, params);

    MeasureContext ctx;
    ctx.net = &net;
    ctx.eff = &eff;
    ctx.graph = &graph;
    ctx.budget = opts.budget;
    ctx.denseCap = opts.denseCap;

    for (std::size_t m = 0; m < kinds.size(); ++m) {
      BenchmarkCell cell;
      cell.nodes = size;
      cell.measure = measureNames[m];
      std::vector<double> times;
      for (int rep = 0; rep < opts.repetitions; ++rep) {
        const auto start = std::chrono::steady_clock::now();
        try {
          computeMeasure(kinds[m], ctx);
        } catch (const CapacityError&) {
          cell.note = "capacity";
          break;
        } catch (const Error& e) {
          cell.note = e.what();
          break;
        }
        times.push_back(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
      }
      if (times.size() == static_cast<std::size_t>(opts.repetitions)) {
        std::sort(times.begin(), times.end());
        const std::size_t mid = times.size() / 2;
        cell.medianSeconds =
            times.size() % 2 == 1 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

}  // namespace muxcent
