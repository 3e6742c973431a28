#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "muxcent/io.hpp"
#include "muxcent/opinion.hpp"
#include "test_util.hpp"

using namespace muxcent;

TEST(EdgeListParse, SingleLine) {
  const auto edges = io::parseEdgeList("a b L1 0.5");
  ASSERT_EQ(edges.size(), 1u);
  EXPECT_EQ(edges[0].source, "a");
  EXPECT_EQ(edges[0].target, "b");
  EXPECT_EQ(edges[0].layer, "L1");
  EXPECT_DOUBLE_EQ(edges[0].weight, 0.5);
  EXPECT_EQ(edges[0].line, 1);
}

TEST(EdgeListParse, SkipsCommentsAndBlankLines) {
  const auto edges = io::parseEdgeList("# comment\n\na b L1 0.5\n");
  ASSERT_EQ(edges.size(), 1u);
  EXPECT_EQ(edges[0].source, "a");
  EXPECT_EQ(edges[0].line, 3);
}

TEST(EdgeListParse, AcceptsCommasAndCrlf) {
  const auto edges = io::parseEdgeList("a,b,L1,0.5\r\nb, c ,L2, 0.25\r\n");
  ASSERT_EQ(edges.size(), 2u);
  EXPECT_EQ(edges[1].target, "c");
  EXPECT_EQ(edges[1].layer, "L2");
  EXPECT_DOUBLE_EQ(edges[1].weight, 0.25);
}

TEST(EdgeListParse, ErrorsCarryLineNumbers) {
  try {
    io::parseEdgeList("a b L1 0.5\na b L1");
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  try {
    io::parseEdgeList("a b L1 -1");
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("line 1"), std::string::npos) << e.what();
  }
  EXPECT_THROW(io::parseEdgeList("a b L1 zero"), InputError);
  EXPECT_THROW(io::parseEdgeList("a b L1 1e"), InputError);
  EXPECT_THROW(io::parseEdgeList("a b L1 inf"), InputError);
}

TEST(EdgeListParse, LayerVariantAssignsTheGivenLayer) {
  const auto edges = io::parseLayerEdgeList("# per-layer file\na b 0.5\nb c 0.25", "social");
  ASSERT_EQ(edges.size(), 2u);
  EXPECT_EQ(edges[0].layer, "social");
  EXPECT_EQ(edges[1].layer, "social");
  EXPECT_THROW(io::parseLayerEdgeList("a b L1 0.5", "social"), InputError);  // 4 fields
}

TEST(EdgeListRoundTrip, RandomWeightsSurviveExactly) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  std::vector<EdgeRecord> edges;
  for (int i = 0; i < 100; ++i) {
    edges.push_back({"n" + std::to_string(i), "m" + std::to_string(i), "L" + std::to_string(i % 3),
                     dist(rng) / std::pow(10.0, i % 17)});
  }
  const auto parsed = io::parseEdgeList(io::renderEdgeList(edges));
  ASSERT_EQ(parsed.size(), edges.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    EXPECT_EQ(parsed[i].source, edges[i].source);
    EXPECT_EQ(parsed[i].target, edges[i].target);
    EXPECT_EQ(parsed[i].layer, edges[i].layer);
    EXPECT_EQ(parsed[i].weight, edges[i].weight);  // bit-exact
  }
}

TEST(EdgeListRoundTrip, RefusesUnrenderableIds) {
  EXPECT_THROW(io::renderEdgeList({{"a b", "c", "L1", 0.1}}), InputError);
  EXPECT_THROW(io::renderEdgeList({{"a", "c,d", "L1", 0.1}}), InputError);
  EXPECT_THROW(io::renderEdgeList({{"#a", "c", "L1", 0.1}}), InputError);
}

TEST(AlphaTable, ParsesNodeByLayerIntensities) {
  const Eigen::MatrixXd a = io::parseAlphaTable("# header\n1 2\n3, 4\n", 2, 2);
  EXPECT_DOUBLE_EQ(a(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(a(0, 1), 2.0);
  EXPECT_DOUBLE_EQ(a(1, 0), 3.0);
  EXPECT_DOUBLE_EQ(a(1, 1), 4.0);
  EXPECT_THROW(io::parseAlphaTable("1 2\n", 2, 2), InputError);        // short
  EXPECT_THROW(io::parseAlphaTable("1 2\n3 4\n5 6\n", 2, 2), InputError);  // long
  EXPECT_THROW(io::parseAlphaTable("1 2 9\n3 4 9\n", 2, 2), InputError);   // wide
  EXPECT_THROW(io::parseAlphaTable("1 -2\n3 4\n", 2, 2), InputError);      // negative
}

TEST(Config, EmptyObjectGivesDefaults) {
  const io::RunConfig cfg = io::parseConfig("{}");
  EXPECT_DOUBLE_EQ(cfg.budget, 1.0);
  EXPECT_FALSE(cfg.gamma.has_value());
  EXPECT_DOUBLE_EQ(cfg.alphaUniform, 1.0);
  EXPECT_FALSE(cfg.alphaFile.has_value());
  EXPECT_DOUBLE_EQ(cfg.delta, 0.001);
  EXPECT_EQ(cfg.seed, 1u);
  EXPECT_EQ(cfg.normalization, NormalizationMode::Cap);
  EXPECT_EQ(cfg.utility, UtilityKind::Linear);
}

TEST(Config, ValuesOverrideDefaults) {
  const io::RunConfig cfg = io::parseConfig(
      R"({"budget": 2, "gamma": 1, "alpha": 0.5, "delta": 0.01, "seed": 42,
          "normalization": "strict", "utility": "weighted-min", "utility_weights": [1, 2]})");
  EXPECT_DOUBLE_EQ(cfg.budget, 2.0);
  ASSERT_TRUE(cfg.gamma.has_value());
  EXPECT_DOUBLE_EQ(*cfg.gamma, 1.0);
  EXPECT_DOUBLE_EQ(cfg.alphaUniform, 0.5);
  EXPECT_DOUBLE_EQ(cfg.delta, 0.01);
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_EQ(cfg.normalization, NormalizationMode::Strict);
  EXPECT_EQ(cfg.utility, UtilityKind::WeightedMin);
  EXPECT_EQ(cfg.utilityWeights, (std::vector<double>{1.0, 2.0}));
}

TEST(Config, GammaAutoIsTheDefaultAndResets) {
  const io::RunConfig cfg = io::parseConfig(R"({"gamma": "auto"})");
  EXPECT_FALSE(cfg.gamma.has_value());
}

TEST(Config, RejectsBadValuesNamingTheKey) {
  try {
    io::parseConfig(R"({"delta": 1.5})");
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("delta"), std::string::npos);
  }
  EXPECT_THROW(io::parseConfig(R"({"budgett": 2})"), InputError);  // typo protection
  EXPECT_THROW(io::parseConfig(R"({"budget": 0})"), InputError);
  EXPECT_THROW(io::parseConfig(R"({"budget": "two"})"), InputError);
  EXPECT_THROW(io::parseConfig(R"({"gamma": -1})"), InputError);
  EXPECT_THROW(io::parseConfig(R"({"seed": -3})"), InputError);
  EXPECT_THROW(io::parseConfig(R"({"seed": 1.5})"), InputError);
  EXPECT_THROW(io::parseConfig(R"({"normalization": "clamp"})"), InputError);
  EXPECT_THROW(io::parseConfig(R"({"utility": "min"})"), InputError);
  EXPECT_THROW(io::parseConfig(R"({"utility_weights": [1, 0]})"), InputError);
  EXPECT_THROW(io::parseConfig("[]"), InputError);
  EXPECT_THROW(io::parseConfig("{"), InputError);
}

TEST(Report, InstanceWCsvBytes) {
  const MultiplexNetwork net = testutil::instanceW();
  const CentralityResult r = opinionCentrality(net, uniformParams(net, 1.0, 2.0), 1.0);
  EXPECT_EQ(io::writeReportCsv(r, net.nodeIds()),
            "node,value,budget_share,rank\n"
            "a,1.015625,0.5078125,1\n"
            "b,0.984375,0.4921875,2\n");
}

TEST(Report, UniformTieOnEdgelessNetwork) {
  const MultiplexNetwork net = testutil::edgeless(3);
  const CentralityResult r = opinionCentrality(net, uniformParams(net, 1.0, 1.0));
  EXPECT_EQ(io::writeReportCsv(r, net.nodeIds()),
            "node,value,budget_share,rank\n"
            "a,0.333333333333,0.333333333333,2\n"
            "b,0.333333333333,0.333333333333,2\n"
            "c,0.333333333333,0.333333333333,2\n");
}

TEST(Report, EmptyResultIsHeaderOnly) {
  EXPECT_EQ(io::writeReportCsv(makeResult(Eigen::VectorXd()), {}), "node,value,budget_share,rank\n");
}

TEST(Report, MissingSharesLeaveTheCellEmpty) {
  CentralityResult r = makeResult(Eigen::Vector2d(2.0, 1.0));
  EXPECT_EQ(io::writeReportCsv(r, {"x", "y"}),
            "node,value,budget_share,rank\n"
            "x,2,,1\n"
            "y,1,,2\n");
}

TEST(Report, CsvQuotesAwkwardIds) {
  CentralityResult r = makeResult(Eigen::Vector2d(2.0, 1.0));
  const std::string csv = io::writeReportCsv(r, {"a,b", "c\"d"});
  EXPECT_NE(csv.find("\"a,b\""), std::string::npos);
  EXPECT_NE(csv.find("\"c\"\"d\""), std::string::npos);
}

TEST(Report, JsonMirrorsCsvAndCarriesDiagnostics) {
  const MultiplexNetwork net = testutil::instanceW();
  const CentralityResult r = opinionCentrality(net, uniformParams(net, 1.0, 2.0), 1.0);
  const io::json doc = io::json::parse(io::writeReportJson(r, net.nodeIds()));
  ASSERT_EQ(doc["nodes"].size(), 2u);
  EXPECT_EQ(doc["nodes"][0]["node"], "a");
  EXPECT_DOUBLE_EQ(doc["nodes"][0]["value"].get<double>(), 1.015625);
  EXPECT_DOUBLE_EQ(doc["nodes"][0]["budget_share"].get<double>(), 0.5078125);
  EXPECT_DOUBLE_EQ(doc["nodes"][0]["rank"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(doc["diagnostics"]["total_rate"].get<double>(), 4.0);
  EXPECT_DOUBLE_EQ(doc["diagnostics"]["gamma"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(doc["diagnostics"]["gamma_bound"].get<double>(), 0.5);
  EXPECT_FALSE(doc["diagnostics"]["gamma_bound_is_estimate"].get<bool>());
  EXPECT_EQ(doc["diagnostics"]["conditions"]["verdict"], "pass");
  EXPECT_EQ(doc["diagnostics"]["conditions"]["worst_row"], "b");
}

TEST(Report, WritingIsDeterministic) {
  const MultiplexNetwork net = testutil::triangle();
  const CentralityResult r = opinionCentrality(net, uniformParams(net, 1.0, 1.0));
  EXPECT_EQ(io::writeReportCsv(r, net.nodeIds()), io::writeReportCsv(r, net.nodeIds()));
  EXPECT_EQ(io::writeReportJson(r, net.nodeIds()), io::writeReportJson(r, net.nodeIds()));
}

TEST(Report, SizeMismatchIsAnError) {
  EXPECT_THROW(io::writeReportCsv(makeResult(Eigen::Vector2d(1.0, 2.0)), {"only"}), InputError);
}

TEST(Formatting, TwelveSignificantDigits) {
  EXPECT_EQ(io::formatNumber(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(io::formatNumber(2.0), "2");
  EXPECT_EQ(io::formatNumber(0.5078125), "0.5078125");
  EXPECT_EQ(io::formatNumber(123456789012345.0), "1.23456789012e+14");
}

TEST(Trace, OneRowPerSampleAndNode) {
  std::vector<SimulationSample> samples(1);
  samples[0].event = 5;
  samples[0].state = Eigen::Vector2d(0.25, 0.5);
  samples[0].runningMean = Eigen::Vector2d(0.2, 0.4);
  EXPECT_EQ(io::writeTraceCsv(samples, {"a", "b"}),
            "event,node,x\n"
            "5,a,0.25\n"
            "5,b,0.5\n");
}
