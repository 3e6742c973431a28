#pragma once

#include <json.hpp>

#include <Eigen/Dense>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "muxcent/analysis.hpp"
#include "muxcent/barrel.hpp"
#include "muxcent/dynamics.hpp"
#include "muxcent/errors.hpp"
#include "muxcent/multiplex.hpp"
#include "muxcent/opinion.hpp"
#include "muxcent/result.hpp"

namespace muxcent::io {

using json = nlohmann::json;

// Report precision: 12 significant digits everywhere a human-facing number
// is printed.
inline std::string formatNumber(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Shortest exact rendering; used where parse(render(x)) must reproduce x
// bit for bit.
inline std::string formatExact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// JSON numbers are first rounded to the report precision so both output
// formats show the same digits.
inline double reportValue(double v) { return std::strtod(formatNumber(v).c_str(), nullptr); }

namespace detail {

inline std::string csvField(const std::string& raw) {
  if (raw.find_first_of(",\"\n\r") == std::string::npos) return raw;
  std::string quoted = "\"";
  for (char ch : raw) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  quoted += '"';
  return quoted;
}

inline std::vector<std::string> splitFields(std::string line) {
  for (char& ch : line) {
    if (ch == ',') ch = ' ';
  }
  std::istringstream in(line);
  std::vector<std::string> fields;
  std::string field;
  while (in >> field) fields.push_back(field);
  return fields;
}

inline double parseWeight(const std::string& text, int line) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end != begin + text.size() || !std::isfinite(value)) {
    throw InputError("line " + std::to_string(line) + ": weight '" + text + "' is not a finite number");
  }
  if (value < 0.0) {
    throw InputError("line " + std::to_string(line) + ": weight " + text + " is negative");
  }
  return value;
}

// Strips one trailing carriage return so CRLF files parse like LF files.
inline void forEachLine(const std::string& text, const std::function<void(const std::string&, int)>& fn) {
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    fn(line, number);
  }
}

inline bool isSkippable(const std::string& line) {
  const auto first = line.find_first_not_of(" \t");
  return first == std::string::npos || line[first] == '#';
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Edge lists.

// Four whitespace- or comma-separated fields per line: source, target, layer,
// weight.  `#` comments and blank lines are skipped.  Records keep their
// source line for error messages downstream.
inline std::vector<EdgeRecord> parseEdgeList(const std::string& text) {
  std::vector<EdgeRecord> edges;
  detail::forEachLine(text, [&](const std::string& line, int number) {
    if (detail::isSkippable(line)) return;
    const std::vector<std::string> fields = detail::splitFields(line);
    if (fields.size() != 4) {
      throw InputError("line " + std::to_string(number) + ": expected 4 fields (source target layer weight), got " +
                       std::to_string(fields.size()));
    }
    edges.push_back({fields[0], fields[1], fields[2], detail::parseWeight(fields[3], number), number});
  });
  return edges;
}

// Per-layer variant: three fields (source, target, weight); every record is
// assigned to `layerId`.
inline std::vector<EdgeRecord> parseLayerEdgeList(const std::string& text, const std::string& layerId) {
  if (layerId.empty()) {
    throw InputError("layer id must not be empty");
  }
  std::vector<EdgeRecord> edges;
  detail::forEachLine(text, [&](const std::string& line, int number) {
    if (detail::isSkippable(line)) return;
    const std::vector<std::string> fields = detail::splitFields(line);
    if (fields.size() != 3) {
      throw InputError("line " + std::to_string(number) + ": expected 3 fields (source target weight), got " +
                       std::to_string(fields.size()));
    }
    edges.push_back({fields[0], fields[1], layerId, detail::parseWeight(fields[2], number), number});
  });
  return edges;
}

// Inverse of parseEdgeList up to line numbers: weights render with exact
// round-trip precision.
inline std::string renderEdgeList(const std::vector<EdgeRecord>& edges) {
  std::string out;
  for (const auto& e : edges) {
    for (const std::string* id : {&e.source, &e.target, &e.layer}) {
      if (id->empty() || id->find_first_of(" \t,#") != std::string::npos) {
        throw InputError("id '" + *id + "' cannot be rendered: ids must be non-empty and free of "
                         "whitespace, commas, and '#'");
      }
    }
    out += e.source + " " + e.target + " " + e.layer + " " + formatExact(e.weight) + "\n";
  }
  return out;
}

// Whitespace/comma table of imitation intensities: one row per node in node
// order, one column per layer in layer order.
inline Eigen::MatrixXd parseAlphaTable(const std::string& text, Eigen::Index nodes, Eigen::Index layers) {
  Eigen::MatrixXd alpha(nodes, layers);
  Eigen::Index row = 0;
  detail::forEachLine(text, [&](const std::string& line, int number) {
    if (detail::isSkippable(line)) return;
    const std::vector<std::string> fields = detail::splitFields(line);
    if (row >= nodes) {
      throw InputError("line " + std::to_string(number) + ": intensity table has more rows than the network has "
                       "nodes (" + std::to_string(nodes) + ")");
    }
    if (static_cast<Eigen::Index>(fields.size()) != layers) {
      throw InputError("line " + std::to_string(number) + ": expected " + std::to_string(layers) +
                       " intensities (one per layer), got " + std::to_string(fields.size()));
    }
    for (Eigen::Index c = 0; c < layers; ++c) {
      alpha(row, c) = detail::parseWeight(fields[static_cast<std::size_t>(c)], number);
    }
    ++row;
  });
  if (row != nodes) {
    throw InputError("intensity table has " + std::to_string(row) + " rows but the network has " +
                     std::to_string(nodes) + " nodes");
  }
  return alpha;
}

// ---------------------------------------------------------------------------
// Run configuration.

struct RunConfig {
  double budget = 1.0;
  std::optional<double> gamma;  // empty = automatic from the positivity bound
  double alphaUniform = 1.0;
  std::optional<std::string> alphaFile;
  double delta = 0.001;
  std::uint64_t seed = 1;
  NormalizationMode normalization = NormalizationMode::Cap;
  UtilityKind utility = UtilityKind::Linear;
  std::vector<double> utilityWeights;
};

inline UtilityKind parseUtilityKind(const std::string& name) {
  if (name == "linear") return UtilityKind::Linear;
  if (name == "weighted-min") return UtilityKind::WeightedMin;
  if (name == "cobb-douglas") return UtilityKind::CobbDouglas;
  throw InputError("unknown utility '" + name + "' (known: linear, weighted-min, cobb-douglas)");
}

// Flat JSON object; unknown keys are rejected so typos cannot silently fall
// back to defaults.
inline RunConfig parseConfig(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw InputError("config must be a single JSON object");
  }

  RunConfig cfg;
  auto number = [](const json& v, const char* key) {
    if (!v.is_number()) throw InputError(std::string("config key '") + key + "' must be a number");
    return v.get<double>();
  };
  for (const auto& [key, value] : doc.items()) {
    if (key == "budget") {
      cfg.budget = number(value, "budget");
      if (!std::isfinite(cfg.budget) || cfg.budget <= 0.0) {
        throw InputError("config key 'budget' must be positive");
      }
    } else if (key == "gamma") {
      if (value.is_string() && value.get<std::string>() == "auto") {
        cfg.gamma.reset();
      } else {
        const double g = number(value, "gamma");
        if (!std::isfinite(g) || g <= 0.0) {
          throw InputError("config key 'gamma' must be a positive number or \"auto\"");
        }
        cfg.gamma = g;
      }
    } else if (key == "alpha") {
      cfg.alphaUniform = number(value, "alpha");
      if (!std::isfinite(cfg.alphaUniform) || cfg.alphaUniform < 0.0) {
        throw InputError("config key 'alpha' must be non-negative");
      }
    } else if (key == "alpha_file") {
      if (!value.is_string()) throw InputError("config key 'alpha_file' must be a path string");
      cfg.alphaFile = value.get<std::string>();
    } else if (key == "delta") {
      cfg.delta = number(value, "delta");
      if (!(cfg.delta > 0.0) || !(cfg.delta < 1.0)) {
        throw InputError("config key 'delta' is outside (0, 1)");
      }
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) throw InputError("config key 'seed' must be a non-negative integer");
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "normalization") {
      if (!value.is_string()) throw InputError("config key 'normalization' must be a string");
      const auto mode = parseNormalizationMode(value.get<std::string>());
      if (!mode) {
        throw InputError("config key 'normalization' must be one of strict, cap, stochastic");
      }
      cfg.normalization = *mode;
    } else if (key == "utility") {
      if (!value.is_string()) throw InputError("config key 'utility' must be a string");
      cfg.utility = parseUtilityKind(value.get<std::string>());
    } else if (key == "utility_weights") {
      if (!value.is_array()) throw InputError("config key 'utility_weights' must be an array of positive numbers");
      cfg.utilityWeights.clear();
      for (const auto& w : value) {
        const double x = number(w, "utility_weights");
        if (!std::isfinite(x) || x <= 0.0) {
          throw InputError("config key 'utility_weights' must contain positive numbers only");
        }
        cfg.utilityWeights.push_back(x);
      }
    } else {
      throw InputError("unknown config key '" + key + "'");
    }
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Centrality reports.

// Row order shared by both report formats: rank ascending (most central
// first), ties broken by first-seen node index.
inline std::vector<Eigen::Index> reportOrder(const CentralityResult& r) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(r.values.size()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index u, Eigen::Index v) { return r.ranks[u] < r.ranks[v]; });
  return order;
}

inline void requireIds(const CentralityResult& r, const std::vector<std::string>& nodeIds) {
  if (static_cast<Eigen::Index>(nodeIds.size()) != r.values.size()) {
    throw InputError("node id list does not match the result size");
  }
}

inline std::string writeReportCsv(const CentralityResult& r, const std::vector<std::string>& nodeIds) {
  requireIds(r, nodeIds);
  std::string out = "node,value,budget_share,rank\n";
  for (Eigen::Index i : reportOrder(r)) {
    out += detail::csvField(nodeIds[static_cast<std::size_t>(i)]);
    out += ',';
    out += formatNumber(r.values[i]);
    out += ',';
    if (r.budgetShares) out += formatNumber((*r.budgetShares)[i]);
    out += ',';
    out += formatNumber(r.ranks[i]);
    out += '\n';
  }
  return out;
}

inline json conditionJson(const ConditionReport& c, const std::vector<std::string>* nodeIds = nullptr) {
  json j;
  j["max_row_sum"] = reportValue(c.maxRowSum);
  if (c.worstRow >= 0 && nodeIds && static_cast<std::size_t>(c.worstRow) < nodeIds->size()) {
    j["worst_row"] = (*nodeIds)[static_cast<std::size_t>(c.worstRow)];
  } else if (c.worstRow >= 0) {
    j["worst_row"] = c.worstRow;
  } else {
    j["worst_row"] = nullptr;
  }
  j["row_sums_ok"] = c.rowSumsOk;
  j["sym_top_eigenvalue"] = reportValue(c.symTopEigenvalue);
  j["shifted_sym_top_eigenvalue"] = reportValue(c.shiftedSymTopEigenvalue);
  j["eigenvalue_ok"] = c.eigenvalueOk;
  j["ok"] = c.ok;
  j["verdict"] = c.ok ? "pass" : "fail";
  return j;
}

inline json reportJson(const CentralityResult& r, const std::vector<std::string>& nodeIds) {
  requireIds(r, nodeIds);
  json nodes = json::array();
  for (Eigen::Index i : reportOrder(r)) {
    json row;
    row["node"] = nodeIds[static_cast<std::size_t>(i)];
    row["value"] = reportValue(r.values[i]);
    if (r.budgetShares) {
      row["budget_share"] = reportValue((*r.budgetShares)[i]);
    } else {
      row["budget_share"] = nullptr;
    }
    row["rank"] = reportValue(r.ranks[i]);
    nodes.push_back(std::move(row));
  }

  json diag;
  const Diagnostics& d = r.diagnostics;
  diag["total_rate"] = d.totalRate ? json(reportValue(*d.totalRate)) : json(nullptr);
  diag["gamma"] = d.gammaUsed ? json(reportValue(*d.gammaUsed)) : json(nullptr);
  diag["gamma_bound"] = d.gammaBound ? json(reportValue(*d.gammaBound)) : json(nullptr);
  diag["gamma_bound_is_estimate"] = d.gammaBoundIsEstimate;
  diag["conditions"] = d.conditions ? conditionJson(*d.conditions, &nodeIds) : json(nullptr);
  json ties = json::array();
  for (Eigen::Index i : d.ties) ties.push_back(nodeIds[static_cast<std::size_t>(i)]);
  diag["ties"] = std::move(ties);
  diag["warnings"] = d.warnings;

  json out;
  out["nodes"] = std::move(nodes);
  out["diagnostics"] = std::move(diag);
  return out;
}

inline std::string writeReportJson(const CentralityResult& r, const std::vector<std::string>& nodeIds) {
  return reportJson(r, nodeIds).dump(2) + "\n";
}

inline std::string writeConditionJson(const ConditionReport& c, const std::vector<std::string>& nodeIds) {
  return conditionJson(c, &nodeIds).dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Simulation traces.

inline std::string writeTraceCsv(const std::vector<SimulationSample>& samples,
                                 const std::vector<std::string>& nodeIds) {
  std::string out = "event,node,x\n";
  for (const auto& s : samples) {
    if (s.state.size() != static_cast<Eigen::Index>(nodeIds.size())) {
      throw InputError("node id list does not match the trace state size");
    }
    for (Eigen::Index i = 0; i < s.state.size(); ++i) {
      out += std::to_string(s.event);
      out += ',';
      out += detail::csvField(nodeIds[static_cast<std::size_t>(i)]);
      out += ',';
      out += formatNumber(s.state[i]);
      out += '\n';
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Comparison pipeline output.

// Flat matrix: one row per measure, its Spearman coefficient against every
// measure (empty cell = failed/skipped/undefined), then timing and status.
inline std::string writeComparisonCsv(const ComparisonReport& report) {
  std::string out = "measure";
  for (const auto& o : report.outcomes) out += ',' + detail::csvField(o.name);
  out += ",seconds,status,note\n";
  for (std::size_t i = 0; i < report.outcomes.size(); ++i) {
    const auto& o = report.outcomes[i];
    out += detail::csvField(o.name);
    for (std::size_t j = 0; j < report.outcomes.size(); ++j) {
      out += ',';
      if (report.rho[i][j]) out += formatNumber(*report.rho[i][j]);
    }
    out += ',';
    if (o.status == "ok") out += formatNumber(o.seconds);
    out += ',' + o.status + ',' + detail::csvField(o.note) + '\n';
  }
  return out;
}

inline std::string writeComparisonJson(const ComparisonReport& report, const std::vector<std::string>& nodeIds) {
  json measures = json::array();
  for (const auto& o : report.outcomes) {
    json m;
    m["name"] = o.name;
    m["status"] = o.status;
    m["note"] = o.note;
    m["seconds"] = o.status == "ok" ? json(reportValue(o.seconds)) : json(nullptr);
    m["rho_vs_opinion"] = o.rhoVsOpinion ? json(reportValue(*o.rhoVsOpinion)) : json(nullptr);
    if (o.result) {
      m["report"] = reportJson(*o.result, nodeIds);
    } else {
      m["report"] = nullptr;
    }
    measures.push_back(std::move(m));
  }

  json rho = json::object();
  for (std::size_t i = 0; i < report.outcomes.size(); ++i) {
    json row = json::object();
    for (std::size_t j = 0; j < report.outcomes.size(); ++j) {
      row[report.outcomes[j].name] = report.rho[i][j] ? json(reportValue(*report.rho[i][j])) : json(nullptr);
    }
    rho[report.outcomes[i].name] = std::move(row);
  }

  json diffs = json::object();
  for (const auto& [name, rows] : report.rankDifferences) {
    json list = json::array();
    for (const auto& row : rows) {
      json r;
      r["node"] = nodeIds.at(static_cast<std::size_t>(row.node));
      r["value"] = reportValue(row.valueA);
      r["rank_opinion"] = reportValue(row.rankA);
      r["rank_baseline"] = reportValue(row.rankB);
      r["delta"] = reportValue(row.delta);
      list.push_back(std::move(r));
    }
    diffs[name] = std::move(list);
  }

  json out;
  out["measures"] = std::move(measures);
  out["rho"] = std::move(rho);
  out["rank_differences"] = std::move(diffs);
  out["notes"] = report.notes;
  return out.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Benchmark, sweep, and reference-table output.

inline std::string writeBenchCsv(const std::vector<BenchmarkCell>& cells) {
  std::string out = "nodes,measure,median_seconds,note\n";
  for (const auto& c : cells) {
    out += std::to_string(c.nodes);
    out += ',' + detail::csvField(c.measure) + ',';
    if (c.medianSeconds) out += formatNumber(*c.medianSeconds);
    out += ',' + detail::csvField(c.note) + '\n';
  }
  return out;
}

inline std::string writeSweepCsv(const std::vector<SweepRow>& rows) {
  std::string out = "alpha_hat,hub1_share,leaf1_share,hub2_share,leaf2_share,max_share_deviation\n";
  for (const auto& r : rows) {
    out += formatNumber(r.alphaHat);
    out += ',' + formatNumber(r.hub1Share);
    out += ',' + formatNumber(r.leaf1Share);
    out += ',' + formatNumber(r.hub2Share);
    out += ',' + formatNumber(r.leaf2Share);
    out += ',' + formatNumber(r.maxShareDeviation) + '\n';
  }
  return out;
}

inline std::string writeCheckTableCsv(const std::vector<CheckRow>& rows) {
  std::string out = "node_class,measure,computed,reference,abs_diff\n";
  for (const auto& r : rows) {
    out += detail::csvField(r.nodeClass);
    out += ',' + detail::csvField(r.measure);
    out += ',' + formatNumber(r.computed);
    out += ',' + formatNumber(r.reference);
    out += ',' + formatNumber(r.absDiff()) + '\n';
  }
  return out;
}

}  // namespace muxcent::io
