#include <gtest/gtest.h>

#include "geodamage/evolution.hpp"
#include "support.hpp"

using namespace geodamage;
using geodamage::testing::shear_load;
using geodamage::testing::unit_law;

namespace {

struct Small {
  FeSpace fe = FeSpace::structured(build_structured_mesh(1.0, 1.0, 3, 3));
  MaterialLaw law = unit_law();
  IncrementalSolver solver{fe, law};
};

const Trajectory& loaded_run() {
  static Small s;
  static const Trajectory traj = run_energetic(shear_load(3.0), s.solver, 12);
  return traj;
}

}  // namespace

TEST(LoadProgram, RampTable) {
  LoadProgram load = shear_load(2.0);
  EXPECT_DOUBLE_EQ(load.ramp(1.5), 1.5);
  EXPECT_DOUBLE_EQ(load.ramp_rate_sq_integral(0.0, 2.0), 2.0);
  load.ramp_table = {{0.0, 0.0}, {1.0, 2.0}, {2.0, 2.0}};
  EXPECT_DOUBLE_EQ(load.ramp(0.5), 1.0);
  EXPECT_DOUBLE_EQ(load.ramp(1.5), 2.0);
  EXPECT_DOUBLE_EQ(load.ramp_rate_sq_integral(0.0, 2.0), 4.0);
  load.ramp_table = {{0.0, 0.0}, {0.0, 1.0}};
  EXPECT_THROW(load.validate(), std::invalid_argument);
}

TEST(Evolution, ZeroRampIsConstant) {
  Small s;
  LoadProgram load = shear_load();
  load.ramp_table = {{0.0, 0.0}, {1.0, 0.0}};
  const Trajectory traj = run_energetic(load, s.solver, 5);
  ASSERT_EQ(traj.states.size(), 6u);
  for (const auto& r : traj.steps) {
    EXPECT_EQ(r.dissipation, 0.0);
    EXPECT_EQ(r.d_alpha_l2, 0.0);
    EXPECT_EQ(r.d_p_h1, 0.0);
    EXPECT_NEAR(r.slack, 0.0, 1e-15);
  }
}

TEST(Evolution, SlackEqualsDeltaForElasticSteps) {
  Small s;
  const LoadProgram load = shear_load(0.2);  // stays below yield
  const Trajectory traj = run_energetic(load, s.solver, 4);
  const double delta = delta_k(load, s.law.hooke, s.fe.measure(), 4);
  EXPECT_GT(delta, 0.0);
  for (const auto& row : discrete_energy_report(traj)) {
    EXPECT_GE(row.slack, -1e-12);
    EXPECT_LE(row.slack, delta + 1e-12);
  }
  EXPECT_EQ(traj.steps.back().d_p_h1, 0.0);
}

TEST(Evolution, InitialStateCertificateFailsForLargeLoad) {
  Small s;
  LoadProgram load = shear_load();
  load.ramp_table = {{0.0, 6.0}, {1.0, 6.0}};
  try {
    make_initial_state(load, s.solver);
    FAIL() << "expected an initial-state error";
  } catch (const InitialStateError& e) {
    EXPECT_GT(e.gap(), 0.0);
    EXPECT_GT(e.competitor().p.norm(), 0.0);
  }
}

TEST(Evolution, SmallInitialLoadIsElastic) {
  Small s;
  LoadProgram load = shear_load();
  load.ramp_table = {{0.0, 0.1}, {1.0, 0.1}};
  const State init = make_initial_state(load, s.solver);
  EXPECT_EQ(init.p.norm(), 0.0);
  EXPECT_EQ(init.alpha.minCoeff(), 1.0);
}

TEST(Evolution, LoadedRunDissipatesMonotonically) {
  const Trajectory& traj = loaded_run();
  double total = 0.0;
  for (std::size_t i = 1; i < traj.steps.size(); ++i) {
    EXPECT_GE(traj.steps[i].dissipation, 0.0);
    EXPECT_GE(traj.steps[i].slack, -1e-9 * std::max(1.0, traj.steps[i].energy.total));
    EXPECT_FALSE(traj.steps[i].flagged);
    total += traj.steps[i].dissipation;
  }
  EXPECT_GT(total, 0.0);
  for (std::size_t i = 1; i < traj.states.size(); ++i)
    EXPECT_LE((traj.states[i].alpha - traj.states[i - 1].alpha).maxCoeff(), 0.0);
  EXPECT_LT(traj.states.back().alpha.minCoeff(), 1.0);
}

TEST(Evolution, FillRecordsReproducesRecords) {
  Trajectory copy = loaded_run();
  Small s;
  fill_records(copy, s.law, s.fe);
  for (std::size_t i = 0; i < copy.steps.size(); ++i) {
    EXPECT_NEAR(copy.steps[i].energy.total, loaded_run().steps[i].energy.total, 1e-12);
    EXPECT_NEAR(copy.steps[i].slack, loaded_run().steps[i].slack, 1e-12);
  }
}

TEST(Evolution, ViscousValidation) {
  Small s;
  EXPECT_THROW(run_viscous(shear_load(), s.solver, 4, 0.0), std::invalid_argument);
  EXPECT_THROW(run_evolution(shear_load(), s.solver, 0, 0.0), std::invalid_argument);
}

TEST(Evolution, LargeViscosityZeroLoadMatchesEnergetic) {
  Small s;
  LoadProgram load = shear_load();
  load.G.setZero();
  const Trajectory v = run_viscous(load, s.solver, 4, 0.9);
  const Trajectory e = run_energetic(load, s.solver, 4);
  for (std::size_t i = 0; i < v.states.size(); ++i) {
    EXPECT_EQ(v.states[i].alpha, e.states[i].alpha);
    EXPECT_EQ(v.states[i].p, e.states[i].p);
  }
}
