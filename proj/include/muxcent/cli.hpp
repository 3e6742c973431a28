#pragma once

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "muxcent/analysis.hpp"
#include "muxcent/barrel.hpp"
#include "muxcent/dynamics.hpp"
#include "muxcent/errors.hpp"
#include "muxcent/io.hpp"
#include "muxcent/multiplex.hpp"
#include "muxcent/opinion.hpp"
#include "muxcent/synthetic.hpp"

namespace muxcent::cli {

namespace detail {

inline std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot read file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// Data goes to the --out file when given, otherwise to the stream.  Output
// text is always fully assembled before this is called, so a failing run
// never leaves a partial file behind.
inline void emit(const std::string& data, const std::string& outPath, std::ostream& out) {
  if (outPath.empty()) {
    out << data;
    return;
  }
  std::ofstream file(outPath, std::ios::binary);
  if (!file) {
    throw InputError("cannot write to '" + outPath + "'");
  }
  file << data;
  if (!file) {
    throw InputError("failed while writing '" + outPath + "'");
  }
}

inline std::vector<std::string> splitList(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string current;
  std::istringstream in(text);
  while (std::getline(in, current, sep)) parts.push_back(current);
  if (!text.empty() && text.back() == sep) parts.push_back("");
  return parts;
}

inline double parseNumber(const std::string& text, const std::string& what) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size() || !std::isfinite(value)) {
    throw InputError(what + " '" + text + "' is not a finite number");
  }
  return value;
}

inline std::optional<double> parseGammaText(const std::string& text) {
  if (text == "auto") return std::nullopt;
  const double g = parseNumber(text, "--gamma value");
  if (g <= 0.0) {
    throw InputError("--gamma must be a positive number or 'auto'");
  }
  return g;
}

// A scalar sets every node's rate; a comma list gives one rate per node in
// first-seen node order.
inline Eigen::VectorXd parseLambdaText(const std::string& text, Eigen::Index nodes) {
  const std::vector<std::string> parts = splitList(text, ',');
  Eigen::VectorXd lambda(nodes);
  if (parts.size() == 1) {
    lambda.setConstant(parseNumber(parts[0], "--lambda value"));
  } else {
    if (static_cast<Eigen::Index>(parts.size()) != nodes) {
      throw InputError("--lambda lists " + std::to_string(parts.size()) + " rates but the network has " +
                       std::to_string(nodes) + " nodes");
    }
    for (Eigen::Index i = 0; i < nodes; ++i) {
      lambda[i] = parseNumber(parts[static_cast<std::size_t>(i)], "--lambda value");
    }
  }
  if (lambda.minCoeff() < 0.0) {
    throw InputError("--lambda rates must be non-negative");
  }
  return lambda;
}

// `a:b:steps` — a linear ladder from a to b inclusive; steps = 1 keeps just a.
inline std::vector<double> parseSweepText(const std::string& text) {
  const std::vector<std::string> parts = splitList(text, ':');
  if (parts.size() != 3) {
    throw InputError("--alpha-sweep expects a:b:steps, got '" + text + "'");
  }
  const double a = parseNumber(parts[0], "--alpha-sweep start");
  const double b = parseNumber(parts[1], "--alpha-sweep end");
  const double stepsRaw = parseNumber(parts[2], "--alpha-sweep step count");
  const auto steps = static_cast<long long>(stepsRaw);
  if (static_cast<double>(steps) != stepsRaw || steps < 1) {
    throw InputError("--alpha-sweep step count must be a positive integer");
  }
  if (!(a > 0.0) || !(b > 0.0)) {
    throw InputError("--alpha-sweep endpoints must be positive");
  }
  std::vector<double> ladder;
  ladder.reserve(static_cast<std::size_t>(steps));
  if (steps == 1) {
    ladder.push_back(a);
  } else {
    for (long long k = 0; k < steps; ++k) {
      ladder.push_back(a + (b - a) * static_cast<double>(k) / static_cast<double>(steps - 1));
    }
  }
  return ladder;
}

inline std::vector<Eigen::Index> parseSizesText(const std::string& text) {
  std::vector<Eigen::Index> sizes;
  for (const std::string& part : splitList(text, ',')) {
    const double v = parseNumber(part, "--sizes entry");
    const auto n = static_cast<Eigen::Index>(v);
    if (static_cast<double>(n) != v || n < 1) {
      throw InputError("--sizes entries must be positive integers, got '" + part + "'");
    }
    sizes.push_back(n);
  }
  if (sizes.empty()) {
    throw InputError("--sizes must list at least one size");
  }
  return sizes;
}

}  // namespace detail

// Per-invocation state shared by the subcommands: network inputs, model
// settings, and output routing.  Defaults come from RunConfig; a --config
// file overrides them; explicitly passed flags override both.
struct Invocation {
  std::string edgesPath;
  std::vector<std::string> layerFiles;  // NAME=PATH
  std::string configPath;
  std::string gammaText = "auto";
  std::string normalizeText = "cap";
  double budget = 1.0;
  double alphaUniform = 1.0;
  std::string alphaFile;
  double delta = 0.001;
  std::uint64_t seed = 1;
  std::string outPath;
  std::string format;  // empty = subcommand default

  io::RunConfig config;  // resolved settings

  void resolve(const CLI::App* sub) {
    // not every subcommand carries every flag, so look options up leniently
    auto given = [sub](const char* name) {
      const CLI::Option* opt = sub->get_option_no_throw(name);
      return opt != nullptr && opt->count() > 0;
    };
    if (given("--config")) {
      config = io::parseConfig(detail::readFile(configPath));
    }
    if (given("--budget")) {
      if (!std::isfinite(budget) || budget <= 0.0) {
        throw InputError("--budget must be positive");
      }
      config.budget = budget;
    }
    if (given("--gamma")) {
      config.gamma = detail::parseGammaText(gammaText);
    }
    if (given("--alpha-uniform")) {
      if (!std::isfinite(alphaUniform) || alphaUniform < 0.0) {
        throw InputError("--alpha-uniform must be non-negative");
      }
      config.alphaUniform = alphaUniform;
      config.alphaFile.reset();
    }
    if (given("--alpha-file")) {
      config.alphaFile = alphaFile;
    }
    if (given("--normalize")) {
      const auto mode = parseNormalizationMode(normalizeText);
      if (!mode) {
        throw InputError("--normalize must be one of strict, cap, stochastic");
      }
      config.normalization = *mode;
    }
    if (given("--delta")) {
      if (!(delta > 0.0) || !(delta < 1.0)) {
        throw InputError("--delta is outside (0, 1)");
      }
      config.delta = delta;
    }
    if (given("--seed")) {
      config.seed = seed;
    }
  }

  std::string resolvedFormat(const char* fallback) const {
    const std::string f = format.empty() ? fallback : format;
    if (f != "csv" && f != "json") {
      throw InputError("--format must be csv or json");
    }
    return f;
  }

  MultiplexNetwork loadNetwork() const {
    std::vector<EdgeRecord> edges;
    if (!edgesPath.empty()) {
      edges = io::parseEdgeList(detail::readFile(edgesPath));
    }
    for (const std::string& spec : layerFiles) {
      const auto eq = spec.find('=');
      if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
        throw InputError("--layer-file expects NAME=PATH, got '" + spec + "'");
      }
      const std::string layerId = spec.substr(0, eq);
      const std::string path = spec.substr(eq + 1);
      for (EdgeRecord& e : io::parseLayerEdgeList(detail::readFile(path), layerId)) {
        edges.push_back(std::move(e));
      }
    }
    if (edgesPath.empty() && layerFiles.empty()) {
      throw InputError("no network input; pass --edges FILE or --layer-file NAME=PATH");
    }
    return buildNetwork(edges, config.normalization);
  }

  ModelParams paramsFor(const MultiplexNetwork& net) const {
    ModelParams params;
    if (config.alphaFile) {
      params.alpha = io::parseAlphaTable(detail::readFile(*config.alphaFile), net.nodeCount(),
                                         static_cast<Eigen::Index>(net.layerCount()));
    } else {
      params.alpha = Eigen::MatrixXd::Constant(net.nodeCount(), static_cast<Eigen::Index>(net.layerCount()),
                                               config.alphaUniform);
    }
    params.budget = config.budget;
    return params;
  }
};

inline void addNetworkOptions(CLI::App* sub, Invocation& inv) {
  sub->add_option("--edges", inv.edgesPath, "edge list file: source target layer weight per line");
  sub->add_option("--layer-file", inv.layerFiles,
                  "per-layer edge list as NAME=PATH (source target weight per line); repeatable");
  sub->add_option("--config", inv.configPath, "JSON run configuration (flags override it)");
  sub->add_option("--normalize", inv.normalizeText, "over-unit imitation handling: strict, cap, or stochastic");
}

inline void addModelOptions(CLI::App* sub, Invocation& inv) {
  sub->add_option("--budget", inv.budget, "total external intensity R to allocate");
  sub->add_option("--gamma", inv.gammaText, "regularization strength, a positive number or 'auto'");
  auto* uniform = sub->add_option("--alpha-uniform", inv.alphaUniform, "same imitation intensity for every node and layer");
  auto* file = sub->add_option("--alpha-file", inv.alphaFile, "per-node, per-layer intensity table file");
  uniform->excludes(file);
  file->excludes(uniform);
}

inline void addOutputOptions(CLI::App* sub, Invocation& inv) {
  sub->add_option("--out", inv.outPath, "write data output to this file instead of standard output");
  sub->add_option("--format", inv.format, "output format: csv or json");
}

inline void reportWarnings(const CentralityResult& r, std::ostream& err) {
  for (const std::string& w : r.diagnostics.warnings) {
    err << "warning: " << w << "\n";
  }
}

// Full command-line surface.  Returns the process exit code; data goes to
// `out` (or --out), everything else to `err`.
inline int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"opinion-based centrality for multiplex networks"};
  app.require_subcommand(1);

  Invocation inv;

  // opinion: closed-form budget allocation (or the raw influence scores)
  auto* opinion = app.add_subcommand("opinion", "compute the opinion centrality allocation");
  bool rawScores = false;
  addNetworkOptions(opinion, inv);
  addModelOptions(opinion, inv);
  addOutputOptions(opinion, inv);
  opinion->add_flag("--raw", rawScores, "report raw influence scores instead of the budget allocation");

  // naive: whole budget on the single most influential node
  auto* naive = app.add_subcommand("naive", "compute the single-target budget allocation");
  addNetworkOptions(naive, inv);
  addModelOptions(naive, inv);
  addOutputOptions(naive, inv);

  // simulate: event-driven opinion process
  auto* simulate = app.add_subcommand("simulate", "run the stochastic opinion process");
  std::string lambdaText;
  std::int64_t events = 1000000;
  std::int64_t sampleEvery = 1000;
  std::string traceOut;
  addNetworkOptions(simulate, inv);
  addModelOptions(simulate, inv);
  addOutputOptions(simulate, inv);
  simulate->add_option("--lambda", lambdaText, "external rate per node: a scalar or a comma list in node order")
      ->required();
  simulate->add_option("--delta", inv.delta, "blend weight of a single event, in (0, 1)");
  simulate->add_option("--events", events, "number of events to simulate");
  simulate->add_option("--seed", inv.seed, "PRNG seed");
  simulate->add_option("--sample-every", sampleEvery, "record the state every this many events (0 = final only)");
  simulate->add_option("--trace-out", traceOut, "also write the sampled trajectory to this CSV file");

  // barrel: canonical two-hub analytics
  auto* barrel = app.add_subcommand("barrel", "analytics on the two-hub barrel topology");
  Eigen::Index barrelNodes = 4;
  std::size_t barrelLayers = 1;
  double e0 = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  std::string sweepText;
  bool checkTable = false;
  barrel->add_option("--nodes", barrelNodes, "even node count (two hubs plus leaves)");
  barrel->add_option("--layers", barrelLayers, "layer count");
  barrel->add_option("--e0", e0, "hub-hub imitation weight per layer")->required();
  barrel->add_option("--e1", e1, "first-star leaf weight per layer")->required();
  barrel->add_option("--e2", e2, "second-star leaf weight per layer")->required();
  auto* sweepOpt =
      barrel->add_option("--alpha-sweep", sweepText, "intensity ladder a:b:steps for the budget-share sweep");
  auto* checkOpt = barrel->add_flag("--check-table1", checkTable,
                                    "compare computed analytics against the closed-form reference table");
  sweepOpt->excludes(checkOpt);
  checkOpt->excludes(sweepOpt);
  addModelOptions(barrel, inv);
  addOutputOptions(barrel, inv);
  barrel->add_option("--config", inv.configPath, "JSON run configuration (flags override it)");

  // compare: run several measures on one network and correlate them
  auto* compare = app.add_subcommand("compare", "compare centrality measures on one network");
  std::string measuresText =
      "opinion,total-degree,in-degree,out-degree,pagerank,eigenvector,katz,hits-hub,hits-authority";
  Eigen::Index topK = 0;
  double damping = 0.85;
  std::string katzText;
  Eigen::Index denseCap = kDenseGammaCap;
  addNetworkOptions(compare, inv);
  addModelOptions(compare, inv);
  addOutputOptions(compare, inv);
  compare->add_option("--measures", measuresText, "comma list of measures to run");
  compare->add_option("--top-k", topK, "restrict rank-movement tables to the k most central opinion nodes");
  compare->add_option("--damping", damping, "PageRank damping factor");
  compare->add_option("--katz-attenuation", katzText, "attenuation factor (default: 0.85 / spectral radius bound)");
  compare->add_option("--dense-cap", denseCap, "largest node count allowed to take dense-matrix paths");

  // bench: timing curves on synthetic networks
  auto* bench = app.add_subcommand("bench", "time measures on synthetic networks");
  std::string sizesText;
  std::string benchMeasuresText = "opinion,total-degree,pagerank";
  int reps = 3;
  std::size_t benchLayers = 2;
  double benchDegree = 8.0;
  addOutputOptions(bench, inv);
  bench->add_option("--sizes", sizesText, "comma list of node counts")->required();
  bench->add_option("--measures", benchMeasuresText, "comma list of measures to time");
  bench->add_option("--reps", reps, "repetitions per cell; the median is reported");
  bench->add_option("--layers", benchLayers, "layer count of the synthetic networks");
  bench->add_option("--degree", benchDegree, "expected out-degree per layer of the synthetic networks");
  bench->add_option("--seed", inv.seed, "PRNG seed for network generation");
  bench->add_option("--dense-cap", denseCap, "largest node count allowed to take dense-matrix paths");

  // validate: condition report only
  auto* validate = app.add_subcommand("validate", "check the stability conditions and report them");
  addNetworkOptions(validate, inv);
  addModelOptions(validate, inv);
  addOutputOptions(validate, inv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {  // --help and friends
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;  // flag problems are input errors
  }

  try {
    if (opinion->parsed()) {
      inv.resolve(opinion);
      const MultiplexNetwork net = inv.loadNetwork();
      const ModelParams params = inv.paramsFor(net);
      const CentralityResult result =
          rawScores ? rawOpinionScore(net, params) : opinionCentrality(net, params, inv.config.gamma);
      reportWarnings(result, err);
      const std::string text = inv.resolvedFormat("csv") == "csv" ? io::writeReportCsv(result, net.nodeIds())
                                                                  : io::writeReportJson(result, net.nodeIds());
      detail::emit(text, inv.outPath, out);
      return 0;
    }

    if (naive->parsed()) {
      inv.resolve(naive);
      const MultiplexNetwork net = inv.loadNetwork();
      const ModelParams params = inv.paramsFor(net);
      const CentralityResult result = naiveOpinionCentrality(net, params);
      reportWarnings(result, err);
      const std::string text = inv.resolvedFormat("csv") == "csv" ? io::writeReportCsv(result, net.nodeIds())
                                                                  : io::writeReportJson(result, net.nodeIds());
      detail::emit(text, inv.outPath, out);
      return 0;
    }

    if (simulate->parsed()) {
      inv.resolve(simulate);
      if (events < 1) throw InputError("--events must be at least 1");
      if (sampleEvery < 0) throw InputError("--sample-every must be non-negative");
      const MultiplexNetwork net = inv.loadNetwork();
      ModelParams params = inv.paramsFor(net);
      params.lambda = detail::parseLambdaText(lambdaText, net.nodeCount());
      const SimulationResult sim =
          muxcent::simulate(net, params, inv.config.delta, Eigen::VectorXd(), events, inv.config.seed, sampleEvery);
      CentralityResult result = makeResult(sim.tailMeanState);
      result.diagnostics.totalRate = params.totalRate();
      const std::string text = inv.resolvedFormat("csv") == "csv" ? io::writeReportCsv(result, net.nodeIds())
                                                                  : io::writeReportJson(result, net.nodeIds());
      std::string trace;
      if (!traceOut.empty()) trace = io::writeTraceCsv(sim.samples, net.nodeIds());
      detail::emit(text, inv.outPath, out);
      if (!traceOut.empty()) detail::emit(trace, traceOut, out);
      return 0;
    }

    if (barrel->parsed()) {
      inv.resolve(barrel);
      if (sweepText.empty() && !checkTable) {
        throw InputError("barrel needs a mode: --alpha-sweep a:b:steps or --check-table1");
      }
      const BarrelSpec spec = uniformBarrelSpec(barrelNodes, barrelLayers, e0, e1, e2);
      const std::string format = inv.resolvedFormat("csv");
      std::string text;
      if (checkTable) {
        const std::vector<CheckRow> rows = referenceComparison(spec, inv.config.alphaUniform, inv.config.budget);
        if (format == "csv") {
          text = io::writeCheckTableCsv(rows);
        } else {
          io::json arr = io::json::array();
          for (const auto& r : rows) {
            arr.push_back({{"node_class", r.nodeClass},
                           {"measure", r.measure},
                           {"computed", io::reportValue(r.computed)},
                           {"reference", io::reportValue(r.reference)},
                           {"abs_diff", io::reportValue(r.absDiff())}});
          }
          text = arr.dump(2) + "\n";
        }
      } else {
        const std::vector<SweepRow> rows =
            alphaSweep(spec, inv.config.budget, inv.config.gamma, detail::parseSweepText(sweepText));
        if (format == "csv") {
          text = io::writeSweepCsv(rows);
        } else {
          io::json arr = io::json::array();
          for (const auto& r : rows) {
            arr.push_back({{"alpha_hat", io::reportValue(r.alphaHat)},
                           {"hub1_share", io::reportValue(r.hub1Share)},
                           {"leaf1_share", io::reportValue(r.leaf1Share)},
                           {"hub2_share", io::reportValue(r.hub2Share)},
                           {"leaf2_share", io::reportValue(r.leaf2Share)},
                           {"max_share_deviation", io::reportValue(r.maxShareDeviation)}});
          }
          text = arr.dump(2) + "\n";
        }
      }
      detail::emit(text, inv.outPath, out);
      return 0;
    }

    if (compare->parsed()) {
      inv.resolve(compare);
      if (topK < 0) throw InputError("--top-k must be non-negative (0 keeps every node)");
      const MultiplexNetwork net = inv.loadNetwork();
      const ModelParams params = inv.paramsFor(net);
      std::optional<double> katzAttenuation;
      if (compare->count("--katz-attenuation") > 0) {
        const double b = detail::parseNumber(katzText, "--katz-attenuation value");
        if (b <= 0.0) throw InputError("--katz-attenuation must be positive");
        katzAttenuation = b;
      }
      const ComparisonReport report = compareMeasures(
          net, params, detail::splitList(measuresText, ','), inv.config.gamma,
          topK > 0 ? std::optional<Eigen::Index>(topK) : std::nullopt, damping, katzAttenuation, denseCap);
      for (const auto& o : report.outcomes) {
        if (o.status != "ok") err << "note: measure " << o.name << " " << o.status << ": " << o.note << "\n";
      }
      for (const auto& n : report.notes) err << "note: " << n << "\n";
      const std::string text = inv.resolvedFormat("csv") == "csv" ? io::writeComparisonCsv(report)
                                                                  : io::writeComparisonJson(report, net.nodeIds());
      detail::emit(text, inv.outPath, out);
      return 0;
    }

    if (bench->parsed()) {
      inv.resolve(bench);
      BenchmarkOptions opts;
      opts.layers = benchLayers;
      opts.expectedDegree = benchDegree;
      opts.repetitions = reps;
      opts.seed = inv.seed;
      opts.denseCap = denseCap;
      const std::vector<BenchmarkCell> cells =
          benchmark(detail::parseSizesText(sizesText), detail::splitList(benchMeasuresText, ','), opts);
      const std::string format = inv.resolvedFormat("csv");
      std::string text;
      if (format == "csv") {
        text = io::writeBenchCsv(cells);
      } else {
        io::json arr = io::json::array();
        for (const auto& c : cells) {
          arr.push_back({{"nodes", c.nodes},
                         {"measure", c.measure},
                         {"median_seconds", c.medianSeconds ? io::json(io::reportValue(*c.medianSeconds))
                                                            : io::json(nullptr)},
                         {"note", c.note}});
        }
        text = arr.dump(2) + "\n";
      }
      detail::emit(text, inv.outPath, out);
      return 0;
    }

    if (validate->parsed()) {
      inv.resolve(validate);
      const MultiplexNetwork net = inv.loadNetwork();
      const ModelParams params = inv.paramsFor(net);
      const EffectiveMatrix eff = effectiveMatrix(net, params);
      const ConditionReport report = validateConditions(eff);
      const std::string format = inv.resolvedFormat("json");
      std::string text;
      if (format == "json") {
        text = io::writeConditionJson(report, net.nodeIds());
      } else {
        const io::json j = io::conditionJson(report, &net.nodeIds());
        text = "key,value\n";
        for (const auto& [key, value] : j.items()) {
          text += key + ',' + (value.is_string() ? value.get<std::string>() : value.dump()) + '\n';
        }
      }
      detail::emit(text, inv.outPath, out);
      if (!report.ok) {
        err << "error: " << describeConditionFailure(report) << "\n";
        return 2;
      }
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.exitCode();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  err << "error: no subcommand selected\n";
  return 1;
}

}  // namespace muxcent::cli
