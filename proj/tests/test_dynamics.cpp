#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "muxcent/dynamics.hpp"
#include "muxcent/synthetic.hpp"
#include "test_util.hpp"

using namespace muxcent;

namespace {

ModelParams simParams(const MultiplexNetwork& net, double alphaHat, Eigen::VectorXd lambda) {
  ModelParams p = uniformParams(net, alphaHat, lambda.sum());
  p.lambda = std::move(lambda);
  return p;
}

}  // namespace

TEST(FixedPoint, HandSolvableTwoNodeSystem) {
  const MultiplexNetwork net = testutil::instanceW();
  const EffectiveMatrix eff = effectiveMatrix(net, uniformParams(net, 1.0, 2.0));
  const Eigen::VectorXd x = fixedPoint(eff, Eigen::Vector2d(1.0, 1.0));
  // rate 4, so both nodes are driven at 1/4; b additionally copies an eighth of a
  EXPECT_DOUBLE_EQ(x[0], 0.25);
  EXPECT_DOUBLE_EQ(x[1], 0.28125);
}

TEST(FixedPoint, RejectsBadRatesAndUnstableDynamics) {
  const MultiplexNetwork net = testutil::instanceW();
  const EffectiveMatrix eff = effectiveMatrix(net, uniformParams(net, 1.0, 2.0));
  EXPECT_THROW(fixedPoint(eff, Eigen::Vector3d(1.0, 1.0, 1.0)), InputError);
  EXPECT_THROW(fixedPoint(eff, Eigen::Vector2d(-1.0, 1.0)), InputError);

  SparseMatrix m(2, 2);
  m.insert(0, 1) = 1.0;  // row sum reaches 1: no contraction
  EXPECT_THROW(fixedPoint(EffectiveMatrix(std::move(m), 1.0), Eigen::Vector2d(0.5, 0.5)), ConditionError);
}

// With no imitation at all, every event is external and the selected (only)
// node moves deterministically: x_k = 1 - (1-delta)^k, whatever the seed.
TEST(Simulate, SingleNodeExternalOnlyIsDeterministic) {
  const MultiplexNetwork net = testutil::edgeless(1);
  ModelParams p = simParams(net, 0.0, Eigen::VectorXd::Ones(1));
  for (std::uint64_t seed : {1u, 999u}) {
    const SimulationResult r = simulate(net, p, 0.5, {}, 4, seed);
    EXPECT_DOUBLE_EQ(r.finalState[0], 0.9375) << "seed " << seed;
    EXPECT_DOUBLE_EQ(r.meanState[0], 0.765625);      // (.5 + .75 + .875 + .9375) / 4
    EXPECT_DOUBLE_EQ(r.tailMeanState[0], 0.90625);   // (.875 + .9375) / 2
    EXPECT_EQ(r.events, 4);
  }
}

TEST(Simulate, SamplesFollowTheRequestedCadence) {
  const MultiplexNetwork net = testutil::edgeless(1);
  ModelParams p = simParams(net, 0.0, Eigen::VectorXd::Ones(1));
  const SimulationResult r = simulate(net, p, 0.5, {}, 5, 1, 2);
  ASSERT_EQ(r.samples.size(), 3u);
  EXPECT_EQ(r.samples[0].event, 2);
  EXPECT_EQ(r.samples[1].event, 4);
  EXPECT_EQ(r.samples[2].event, 5);  // final state is always recorded
  EXPECT_DOUBLE_EQ(r.samples[0].state[0], 0.75);
  EXPECT_DOUBLE_EQ(r.samples[0].runningMean[0], 0.625);  // (.5 + .75) / 2

  // sampling off: only the final snapshot
  const SimulationResult rf = simulate(net, p, 0.5, {}, 5, 1);
  ASSERT_EQ(rf.samples.size(), 1u);
  EXPECT_EQ(rf.samples[0].event, 5);
  EXPECT_DOUBLE_EQ(rf.samples[0].state[0], rf.finalState[0]);
}

TEST(Simulate, SameSeedSameTrajectoryDifferentSeedDifferentTrajectory) {
  const MultiplexNetwork net = testutil::instanceW();
  ModelParams p = simParams(net, 1.0, Eigen::Vector2d(1.0, 1.0));
  const SimulationResult a = simulate(net, p, 0.01, {}, 2000, 42);
  const SimulationResult b = simulate(net, p, 0.01, {}, 2000, 42);
  const SimulationResult c = simulate(net, p, 0.01, {}, 2000, 43);
  EXPECT_TRUE((a.finalState.array() == b.finalState.array()).all());
  EXPECT_TRUE((a.meanState.array() == b.meanState.array()).all());
  EXPECT_FALSE((a.finalState.array() == c.finalState.array()).all());
}

// Replays the documented single-draw recipe to predict which event the first
// step picks, then checks the update for both branches of the table.
TEST(Simulate, FirstEventMatchesTheDocumentedDrawRecipe) {
  const MultiplexNetwork net = testutil::instanceW();
  ModelParams p = simParams(net, 1.0, Eigen::Vector2d(0.0, 0.0));  // imitation events only
  const Eigen::VectorXd x0 = Eigen::Vector2d(1.0, 0.0);

  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    std::mt19937_64 rng(seed);
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const SimulationResult r = simulate(net, p, 0.5, x0, 1, seed);
    if (u < 0.5) {
      // a's imitation event: a listens to nobody, so it just decays
      EXPECT_DOUBLE_EQ(r.finalState[0], 0.5) << "seed " << seed;
      EXPECT_DOUBLE_EQ(r.finalState[1], 0.0);
    } else {
      // b's imitation event: pulled halfway toward a's (pre-decay) opinion
      EXPECT_DOUBLE_EQ(r.finalState[0], 0.5) << "seed " << seed;
      EXPECT_DOUBLE_EQ(r.finalState[1], 0.25);
    }
  }
}

TEST(Simulate, OpinionsStayInTheUnitBox) {
  std::mt19937_64 rng(7);
  for (int round = 0; round < 5; ++round) {
    const MultiplexNetwork net = randomStrictNetwork(12, 2, 4.0, rng);
    Eigen::VectorXd x0(12);
    for (Eigen::Index i = 0; i < 12; ++i) x0[i] = detail::uniform01(rng);
    ModelParams p = simParams(net, 1.0, Eigen::VectorXd::Constant(12, 0.5));
    const SimulationResult r = simulate(net, p, 0.2, x0, 400, rng(), 50);
    for (const auto& s : r.samples) {
      ASSERT_GE(s.state.minCoeff(), 0.0);
      ASSERT_LE(s.state.maxCoeff(), 1.0);
    }
    EXPECT_GE(r.meanState.minCoeff(), 0.0);
    EXPECT_LE(r.meanState.maxCoeff(), 1.0);
  }
}

TEST(Simulate, ValidatesItsInputs) {
  const MultiplexNetwork net = testutil::instanceW();
  ModelParams good = simParams(net, 1.0, Eigen::Vector2d(1.0, 1.0));

  ModelParams noLambda = uniformParams(net, 1.0, 2.0);
  EXPECT_THROW(simulate(net, noLambda, 0.5, {}, 10, 1), InputError);

  EXPECT_THROW(simulate(net, good, 0.0, {}, 10, 1), InputError);
  EXPECT_THROW(simulate(net, good, 1.0, {}, 10, 1), InputError);
  EXPECT_THROW(simulate(net, good, 0.5, {}, 0, 1), InputError);
  EXPECT_THROW(simulate(net, good, 0.5, Eigen::VectorXd::Zero(3), 10, 1), InputError);
  EXPECT_THROW(simulate(net, good, 0.5, Eigen::Vector2d(-0.1, 0.0), 10, 1), InputError);
  EXPECT_THROW(simulate(net, good, 0.5, Eigen::Vector2d(0.5, 1.5), 10, 1), InputError);
}

TEST(Simulate, RefusesOverloadedImitators) {
  // Entries are legal one by one but node c's incoming mass is 1.6, so the
  // event process is undefined.  Only a hand-built network can reach this.
  SparseMatrix m(3, 3);
  m.insert(0, 2) = 0.8;
  m.insert(1, 2) = 0.8;
  const MultiplexNetwork net({"a", "b", "c"}, {"L1"}, {m});
  ModelParams p = simParams(net, 1.0, Eigen::Vector3d(1.0, 1.0, 1.0));
  try {
    simulate(net, p, 0.5, {}, 10, 1);
    FAIL() << "expected ConditionError";
  } catch (const ConditionError& e) {
    EXPECT_NE(std::string(e.what()).find("'c'"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("'L1'"), std::string::npos) << e.what();
  }
}

TEST(Simulate, TailMeanApproachesTheFixedPoint) {
  const MultiplexNetwork net = testutil::instanceW();
  ModelParams p = simParams(net, 1.0, Eigen::Vector2d(1.0, 1.0));
  const EffectiveMatrix eff = effectiveMatrix(net, p);
  const Eigen::VectorXd star = fixedPoint(eff, *p.lambda);
  const SimulationResult r = simulate(net, p, 0.001, {}, 400000, 5);
  EXPECT_LT((r.tailMeanState - star).lpNorm<Eigen::Infinity>(), 0.05);
}

TEST(IntegrateOde, RecordsEveryEulerStep) {
  const MultiplexNetwork net = testutil::instanceW();
  const EffectiveMatrix eff = effectiveMatrix(net, uniformParams(net, 1.0, 2.0));
  const OdeTrajectory traj =
      integrateOde(eff, Eigen::Vector2d(1.0, 1.0), Eigen::Vector2d(0.0, 0.0), 1.0, 0.25);
  ASSERT_EQ(traj.times.size(), 5u);
  ASSERT_EQ(traj.states.size(), 5u);
  EXPECT_DOUBLE_EQ(traj.times.front(), 0.0);
  EXPECT_DOUBLE_EQ(traj.times[1], 0.25);
  EXPECT_DOUBLE_EQ(traj.times.back(), 1.0);

  // the recurrence itself, step for step
  const Eigen::VectorXd drive = Eigen::Vector2d(1.0, 1.0) / eff.totalRate();
  Eigen::VectorXd x = Eigen::Vector2d(0.0, 0.0);
  for (std::size_t k = 1; k < traj.states.size(); ++k) {
    x += 0.25 * (drive + eff.matrix() * x - x);
    EXPECT_DOUBLE_EQ(traj.states[k][0], x[0]);
    EXPECT_DOUBLE_EQ(traj.states[k][1], x[1]);
  }
}

TEST(IntegrateOde, MatchesTheAnalyticSolutionWithoutCoupling) {
  // No imitation: dx/dt = drive - x, so x(t) = drive * (1 - exp(-t)).
  const MultiplexNetwork net = testutil::edgeless(2);
  ModelParams p = simParams(net, 0.0, Eigen::Vector2d(0.3, 0.7));
  const EffectiveMatrix eff = effectiveMatrix(net, p);
  const OdeTrajectory traj = integrateOde(eff, *p.lambda, Eigen::Vector2d(0.0, 0.0), 5.0, 1e-4);
  const double shrink = 1.0 - std::exp(-5.0);
  EXPECT_NEAR(traj.finalState()[0], 0.3 * shrink, 5e-4);
  EXPECT_NEAR(traj.finalState()[1], 0.7 * shrink, 5e-4);
}

TEST(IntegrateOde, SettlesOnTheFixedPoint) {
  const MultiplexNetwork net = testutil::instanceW();
  const EffectiveMatrix eff = effectiveMatrix(net, uniformParams(net, 1.0, 2.0));
  const Eigen::VectorXd lambda = Eigen::Vector2d(1.0, 1.0);
  const OdeTrajectory traj = integrateOde(eff, lambda, Eigen::Vector2d(0.0, 0.0), 100.0, 0.01);
  EXPECT_LT((traj.finalState() - fixedPoint(eff, lambda)).lpNorm<Eigen::Infinity>(), 1e-6);
}

TEST(IntegrateOde, ZeroHorizonKeepsTheInitialState) {
  const MultiplexNetwork net = testutil::instanceW();
  const EffectiveMatrix eff = effectiveMatrix(net, uniformParams(net, 1.0, 2.0));
  const OdeTrajectory traj = integrateOde(eff, Eigen::Vector2d(1.0, 1.0), Eigen::Vector2d(0.5, 0.5), 0.0, 0.1);
  ASSERT_EQ(traj.states.size(), 1u);
  EXPECT_DOUBLE_EQ(traj.finalState()[0], 0.5);
}

TEST(IntegrateOde, ValidatesItsInputs) {
  const MultiplexNetwork net = testutil::instanceW();
  const EffectiveMatrix eff = effectiveMatrix(net, uniformParams(net, 1.0, 2.0));
  const Eigen::VectorXd lambda = Eigen::Vector2d(1.0, 1.0);
  const Eigen::VectorXd x0 = Eigen::Vector2d(0.0, 0.0);
  EXPECT_THROW(integrateOde(eff, Eigen::Vector3d(1.0, 1.0, 1.0), x0, 1.0, 0.1), InputError);
  EXPECT_THROW(integrateOde(eff, lambda, Eigen::Vector3d(0.0, 0.0, 0.0), 1.0, 0.1), InputError);
  EXPECT_THROW(integrateOde(eff, lambda, x0, 1.0, 0.0), InputError);
  EXPECT_THROW(integrateOde(eff, lambda, x0, -1.0, 0.1), InputError);

  SparseMatrix m(2, 2);
  m.insert(0, 1) = 1.0;
  EXPECT_THROW(integrateOde(EffectiveMatrix(std::move(m), 1.0), lambda, x0, 1.0, 0.1), ConditionError);
}
