#include <gtest/gtest.h>

#include "muxcent/barrel.hpp"

using namespace muxcent;

TEST(BarrelBuild, PlacesHubsAndLeavesByIndex) {
  const BarrelSpec spec = uniformBarrelSpec(6, 2, 0.5, 0.3, 0.2);
  const MultiplexNetwork net = buildBarrel(spec);
  ASSERT_EQ(net.nodeCount(), 6);
  ASSERT_EQ(net.layerCount(), 2u);
  EXPECT_EQ(net.nodeIds().front(), "1");
  EXPECT_EQ(net.nodeIds().back(), "6");
  EXPECT_EQ(net.layerIds(), (std::vector<std::string>{"L1", "L2"}));

  for (std::size_t c = 0; c < 2; ++c) {
    const SparseMatrix& m = net.layer(c);
    EXPECT_DOUBLE_EQ(m.coeff(0, 3), 0.5);  // hub 2 imitates hub 1
    EXPECT_DOUBLE_EQ(m.coeff(3, 0), 0.5);  // and vice versa
    EXPECT_DOUBLE_EQ(m.coeff(0, 1), 0.3);  // star-1 leaves listen to hub 1
    EXPECT_DOUBLE_EQ(m.coeff(0, 2), 0.3);
    EXPECT_DOUBLE_EQ(m.coeff(3, 4), 0.2);  // star-2 leaves listen to hub 2
    EXPECT_DOUBLE_EQ(m.coeff(3, 5), 0.2);
    EXPECT_EQ(m.nonZeros(), 6);
  }
}

TEST(BarrelBuild, RejectsMalformedSpecs) {
  EXPECT_THROW(buildBarrel(uniformBarrelSpec(5, 1, 0.1, 0.1, 0.1)), InputError);   // odd
  EXPECT_THROW(buildBarrel(uniformBarrelSpec(2, 1, 0.1, 0.1, 0.1)), InputError);   // too small
  EXPECT_THROW(buildBarrel(uniformBarrelSpec(4, 0, 0.1, 0.1, 0.1)), InputError);   // no layers
  EXPECT_THROW(buildBarrel(uniformBarrelSpec(4, 1, 1.5, 0.1, 0.1)), InputError);   // weight > 1
  EXPECT_THROW(buildBarrel(uniformBarrelSpec(4, 1, 0.1, -0.1, 0.1)), InputError);  // negative
  EXPECT_THROW(buildBarrel({4, {0.1, 0.1}, {0.1}, {0.1}}), InputError);            // ragged layers
}

TEST(EdgeEffectsFold, DividesByTheTotalRate) {
  const EdgeEffects one = edgeEffects(uniformBarrelSpec(4, 1, 0.1, 0.2, 0.3), 1.0, 1.0);
  EXPECT_DOUBLE_EQ(one.hubHub, 0.02);  // rate 1 + 4*1*1 = 5
  EXPECT_DOUBLE_EQ(one.star1, 0.04);
  EXPECT_DOUBLE_EQ(one.star2, 0.06);

  const EdgeEffects two = edgeEffects(uniformBarrelSpec(4, 2, 0.1, 0.2, 0.3), 1.0, 1.0);
  EXPECT_DOUBLE_EQ(two.hubHub, 2.0 * 0.1 / 9.0);  // rate 1 + 4*2*1 = 9
  EXPECT_DOUBLE_EQ(two.star1, 2.0 * 0.2 / 9.0);
  EXPECT_DOUBLE_EQ(two.star2, 2.0 * 0.3 / 9.0);

  EXPECT_THROW(edgeEffects(uniformBarrelSpec(4, 1, 0.1, 0.2, 0.3), -1.0, 1.0), InputError);
  EXPECT_THROW(edgeEffects(uniformBarrelSpec(4, 1, 0.1, 0.2, 0.3), 0.0, 0.0), InputError);  // zero rate
}

TEST(BarrelScores, LeafInfluenceIsExactlyOne) {
  // Nobody listens to a leaf, so its column influence is 1 for any weights,
  // size, or layer count.
  for (const BarrelSpec& spec : {uniformBarrelSpec(4, 1, 0.1, 0.2, 0.3), uniformBarrelSpec(12, 2, 0.25, 0.15, 0.05),
                                 uniformBarrelSpec(20, 5, 0.9, 0.8, 0.7)}) {
    const MultiplexNetwork net = buildBarrel(spec);
    const CentralityResult score = rawOpinionScore(net, uniformParams(net, 1.0, 1.0));
    const Eigen::Index half = spec.nodes / 2;
    for (Eigen::Index i = 0; i < spec.nodes; ++i) {
      if (i == 0 || i == half) continue;
      EXPECT_NEAR(score.values[i], 1.0, 1e-12) << "leaf " << i << " in barrel " << spec.nodes;
    }
    EXPECT_GT(score.values[0], 1.0);
    EXPECT_GT(score.values[half], 1.0);
  }
}

TEST(ReferenceForms, EvaluateTheTabulatedExpressions) {
  const std::vector<ReferenceFormsRow> rows = referenceClosedForms(0.02, 0.04, 0.06, 4);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].nodeClass, "hub1");
  EXPECT_NEAR(rows[0].opinionScore, 2653.0 / 2401.0, 1e-14);  // (1 + .02*1.06 + .04) / .98^2
  EXPECT_DOUBLE_EQ(rows[0].outDegree, 0.06);
  EXPECT_DOUBLE_EQ(rows[0].inDegree, 0.02);
  EXPECT_NEAR(rows[0].pagerank, 1.0 / 19.68, 1e-14);  // 1 / (4 * (5 - 4*.02))
  EXPECT_DOUBLE_EQ(rows[1].opinionScore, 1.0);
  EXPECT_DOUBLE_EQ(rows[1].outDegree, 0.0);
  EXPECT_DOUBLE_EQ(rows[1].inDegree, 0.04);
  EXPECT_NEAR(rows[1].pagerank, 5.08 / 98.4, 1e-14);
  EXPECT_EQ(rows[2].nodeClass, "hub2");
  EXPECT_NEAR(rows[2].opinionScore, (1.0 + 0.02 * 1.04 + 0.06) / 0.9604, 1e-14);
  EXPECT_EQ(rows[3].nodeClass, "leaf2");

  EXPECT_THROW(referenceClosedForms(1.0, 0.0, 0.0, 4), InputError);
  EXPECT_THROW(referenceClosedForms(0.1, 0.1, 0.1, 5), InputError);
}

TEST(ReferenceTable, ExactCellsAgreeAndKnownGapsStayVisible) {
  const std::vector<CheckRow> rows = referenceComparison(uniformBarrelSpec(4, 1, 0.1, 0.2, 0.3), 1.0, 1.0);
  ASSERT_EQ(rows.size(), 16u);

  auto cell = [&](const std::string& cls, const std::string& measure) -> const CheckRow& {
    for (const auto& r : rows) {
      if (r.nodeClass == cls && r.measure == measure) return r;
    }
    throw std::runtime_error("missing cell " + cls + "/" + measure);
  };

  // Exact by construction: leaf scores, every in-degree, leaf out-degrees,
  // and (only at I = 4, where each star has one leaf) the hub out-degrees.
  EXPECT_NEAR(cell("leaf1", "opinion-score").absDiff(), 0.0, 1e-12);
  EXPECT_NEAR(cell("leaf2", "opinion-score").absDiff(), 0.0, 1e-12);
  for (const char* cls : {"hub1", "leaf1", "hub2", "leaf2"}) {
    EXPECT_NEAR(cell(cls, "in-degree").absDiff(), 0.0, 1e-12) << cls;
  }
  EXPECT_NEAR(cell("leaf1", "out-degree").absDiff(), 0.0, 1e-12);
  EXPECT_NEAR(cell("hub1", "out-degree").absDiff(), 0.0, 1e-12);
  EXPECT_NEAR(cell("hub2", "out-degree").absDiff(), 0.0, 1e-12);

  // The hub opinion expression and the unnormalized PageRank recursion do not
  // reproduce the computed values; the table records the gap.
  EXPECT_NEAR(cell("hub1", "opinion-score").computed, 1.0612 / 0.9996, 1e-12);
  EXPECT_NEAR(cell("hub1", "opinion-score").reference, 2653.0 / 2401.0, 1e-12);
  EXPECT_GT(cell("hub1", "opinion-score").absDiff(), 0.01);
  EXPECT_GT(cell("hub1", "pagerank-0.8").absDiff(), 0.01);
}

TEST(Sweep, HoldsGammaFixedAndDriftsTowardUniform) {
  const BarrelSpec spec = uniformBarrelSpec(12, 2, 0.1, 0.2, 0.3);
  const std::vector<SweepRow> rows = alphaSweep(spec, 1.0, std::nullopt, {1.0, 10.0, 100.0});
  ASSERT_EQ(rows.size(), 3u);

  const double gamma0 = *rows[0].result.diagnostics.gammaUsed;
  for (const auto& row : rows) {
    EXPECT_DOUBLE_EQ(*row.result.diagnostics.gammaUsed, gamma0);
    EXPECT_NEAR(row.result.values.sum(), 1.0, 1e-12);
  }
  EXPECT_GT(rows[0].maxShareDeviation, rows[1].maxShareDeviation);
  EXPECT_GT(rows[1].maxShareDeviation, rows[2].maxShareDeviation);

  // the stronger star pulls more budget to its hub
  EXPECT_GT(rows[0].hub2Share, rows[0].hub1Share);
  EXPECT_GT(rows[0].hub1Share, rows[0].leaf1Share);
}

TEST(Sweep, ExplicitGammaIsUsedVerbatim) {
  const BarrelSpec spec = uniformBarrelSpec(4, 1, 0.1, 0.2, 0.3);
  const std::vector<SweepRow> rows = alphaSweep(spec, 1.0, 7.5, {1.0, 2.0});
  for (const auto& row : rows) {
    EXPECT_DOUBLE_EQ(*row.result.diagnostics.gammaUsed, 7.5);
  }
}

TEST(Sweep, RejectsBadLadders) {
  const BarrelSpec spec = uniformBarrelSpec(4, 1, 0.1, 0.2, 0.3);
  EXPECT_THROW(alphaSweep(spec, 1.0, std::nullopt, {}), InputError);
  EXPECT_THROW(alphaSweep(spec, 1.0, std::nullopt, {1.0, 0.0}), InputError);
  EXPECT_THROW(alphaSweep(spec, 1.0, std::nullopt, {-1.0}), InputError);
}
