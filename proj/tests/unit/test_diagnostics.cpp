#include <gtest/gtest.h>

#include "geodamage/diagnostics.hpp"
#include "support.hpp"

using namespace geodamage;
using geodamage::testing::shear_load;
using geodamage::testing::unit_law;

namespace {

struct Fixture {
  FeSpace fe = FeSpace::structured(build_structured_mesh(1.0, 1.0, 3, 3));
  MaterialLaw law = unit_law();
  IncrementalSolver solver{fe, law};
};

Fixture& setup() {
  static Fixture s;
  return s;
}

const Trajectory& loaded() {
  static const Trajectory traj = run_energetic(shear_load(3.0), setup().solver, 12);
  return traj;
}

}  // namespace

TEST(Diagnostics, ConstantTrajectoryPassesEverything) {
  LoadProgram load = shear_load();
  load.G.setZero();
  const Trajectory traj = run_energetic(load, setup().solver, 4);
  for (const auto& c : run_check_suite(traj, setup().solver)) {
    EXPECT_TRUE(c.pass) << c.id;
    EXPECT_LE(std::abs(c.residual), 1e-14) << c.id;
  }
}

TEST(Diagnostics, LoadedRunPassesEverything) {
  // Twelve coarse steps: the balance residual is first order in the step size.
  SuiteOptions opt;
  opt.balance_rate = 0.1;
  for (const auto& c : run_check_suite(loaded(), setup().solver, opt)) EXPECT_TRUE(c.pass) << c.id << " " << c.residual;
}

TEST(Diagnostics, UnrelaxedPlasticStrainIsNotStable) {
  const Fixture& s = setup();
  Vec p = Vec::Zero(kVoigt * s.fe.n_nodes());
  for (int i = 0; i < s.fe.n_nodes(); ++i) set_tensor(p, i, SymTensor2::diag({0.5, 0.5}));
  const State bad = s.solver.elastic_state(Vec::Ones(s.fe.n_nodes()), p, Vec::Zero(s.fe.n_u_dofs()), 0.0);
  const StabilityReport r = stability_at(bad, s.solver, shear_load(), 4, 3);
  EXPECT_GT(r.report.residual, 0.0);
  ASSERT_TRUE(r.worst.has_value());
  EXPECT_LT(total_energy(*r.worst, s.law, s.fe).total, total_energy(bad, s.law, s.fe).total);
}

TEST(Diagnostics, TamperedDamageBreaksIrreversibility) {
  Trajectory traj = loaded();
  EXPECT_TRUE(check_irreversibility(traj).pass);
  traj.states[7].alpha[5] = traj.states[6].alpha[5] + 1e-6;
  const CheckReport r = check_irreversibility(traj);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.index, 7);
  EXPECT_EQ(r.node, 5);
}

TEST(Diagnostics, ZeroDenominatorPairsAreFlagged) {
  std::vector<PairIncrement> pairs(3);
  pairs[0] = {0.2, 0.1, 0.1, 0.1};
  pairs[1] = {0.5, 0.0, 0.0, 0.0};
  pairs[2] = {1e-12, 0.0, 0.0, 0.0};
  const ContinuityReport r = continuity_from(pairs);
  EXPECT_EQ(r.pairs, 3);
  EXPECT_EQ(r.zero_denominator, 2);
  EXPECT_EQ(r.flagged, 1);
  EXPECT_DOUBLE_EQ(r.max_ratio, 2.0);
  EXPECT_DOUBLE_EQ(r.zero_den_numerator, 0.5);
}

TEST(Diagnostics, ContinuityPairsSubsample) {
  EXPECT_EQ(continuity_pairs(5).size(), 10u);
  const auto many = continuity_pairs(400, 1000);
  EXPECT_LE(many.size(), 1000u);
  for (const auto& [i, j] : many) EXPECT_LT(i, j);
}

TEST(Diagnostics, ViscousRunKuhnTucker) {
  const Trajectory traj = run_viscous(shear_load(3.0), setup().solver, 12, 0.1);
  EXPECT_TRUE(check_kuhn_tucker(traj).pass);
  EXPECT_TRUE(check_energy_inequality(traj).pass);
  EXPECT_TRUE(check_hill(traj).pass);
}

TEST(Diagnostics, DissipationBound) {
  EXPECT_TRUE(check_dissipation_bound(loaded(), setup().law, setup().fe).pass);
}
