#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "geodamage/energy.hpp"
#include "geodamage/solver.hpp"

namespace geodamage {

/// Boundary datum w(t, x) = ramp(t) G x with a piecewise-linear ramp.
struct LoadProgram {
  Mat2 G = Mat2::Zero();
  /// (t, value) knots, strictly increasing in t. Empty means ramp(t) = t.
  std::vector<std::pair<double, double>> ramp_table;
  double T = 1.0;

  void validate() const;
  double ramp(double t) const;
  /// Exact int_a^b ramp'(t)^2 dt.
  double ramp_rate_sq_integral(double a, double b) const;
  /// Frobenius norm of sym(G).
  double sym_norm() const;
  SymTensor2 sym_g() const;
};

/// Per-step bookkeeping; entry 0 describes the initial state.
struct StepRecord {
  int index = 0;
  double t = 0.0;
  EnergyBreakdown energy;
  double dissipation = 0.0;      // Hcal(p_i - p_{i-1})
  bool dissipation_infinite = false;
  double viscous = 0.0;          // eps/(2 tau) |alpha_i - alpha_{i-1}|_2^2
  double work = 0.0;             // tau (C e_{i-1}, E wdot_i)
  double work_end = 0.0;         // tau (C e_i, E wdot_i)
  double lhs = 0.0, rhs = 0.0, slack = 0.0;
  double kt_residual = 0.0;
  double hill_start = 0.0;       // | Hcal(pdot) - S_{i-1}.pdot |
  double hill_end = 0.0;         // | Hcal(pdot) - S_i.pdot |
  double stress_residual = 0.0;
  double equilibrium = 0.0;
  double psi = 0.0;
  double plastic_residual = 0.0;
  double damage_kkt = 0.0;
  int sweeps = 0;
  int start = 0;
  bool flagged = false;
  bool monotone = true;
  double d_alpha_l2 = 0.0, d_alpha_h1 = 0.0, d_alpha_l1 = 0.0;
  double d_e_l2 = 0.0, d_p_h1 = 0.0, d_p_l1 = 0.0, d_u_h1 = 0.0;
  double d_w_strain = 0.0;       // |E(w_i - w_{i-1})|_2
};

struct Trajectory {
  double eps = 0.0;
  int k = 0;
  LoadProgram load;
  std::vector<State> states;
  std::vector<StepRecord> steps;

  double tau() const { return load.T / k; }
  std::vector<Vec> plastic_history() const;
};

/// Sound state in elastic equilibrium with w(0), certified by one incremental
/// solve at t = 0. Throws InitialStateError if the solve finds a better state.
State make_initial_state(const LoadProgram& load, const IncrementalSolver& solver);

class InitialStateError : public std::runtime_error {
 public:
  InitialStateError(const std::string& what, State competitor, double gap)
      : std::runtime_error(what), competitor_(std::move(competitor)), gap_(gap) {}
  const State& competitor() const { return competitor_; }
  double gap() const { return gap_; }

 private:
  State competitor_;
  double gap_;
};

using StepCallback = std::function<void(const StepRecord&)>;

/// Time-marches the incremental scheme on t_i = i T / k; eps = 0 gives the
/// energetic scheme. Throws SolverFailure if a step violates the discrete
/// energy inequality beyond slack_tol * scale.
Trajectory run_evolution(const LoadProgram& load, const IncrementalSolver& solver, int k, double eps,
                         double slack_tol = 1e-9, const StepCallback& on_step = {});

inline Trajectory run_energetic(const LoadProgram& load, const IncrementalSolver& solver, int k) {
  return run_evolution(load, solver, k, 0.0);
}
Trajectory run_viscous(const LoadProgram& load, const IncrementalSolver& solver, int k, double eps);

/// delta_k = tau (gamma2/2) int_0^T |E wdot|_2^2.
double delta_k(const LoadProgram& load, const HookeLaw& hooke, double measure, int k);

/// Recomputes every per-step record from stored states.
void fill_records(Trajectory& traj, const MaterialLaw& law, const FeSpace& fe);

struct EnergyReportRow {
  int index;
  double t, lhs, rhs, slack;
};
std::vector<EnergyReportRow> discrete_energy_report(const Trajectory& traj);

/// max over nonempty records of state norms |alpha|_H1 + |u|_H1 + |e|_2 + |p|_H1.
double uniform_bound(const Trajectory& traj, const FeSpace& fe);

struct ViscousTotals {
  double alpha_rate_h1 = 0.0;     // sum tau |alphadot|_H1
  double alpha_rate_h1_sq = 0.0;  // sum tau |alphadot|_H1^2
  double alpha_rate_l2_sq = 0.0;  // sum tau |alphadot|_2^2
  double max_increment_ratio = 0.0;  // max (|De|_2 + |Dp|_H1) / (|Dalpha|_2 + |EDw|_2)
};
ViscousTotals viscous_totals(const Trajectory& traj);

}  // namespace geodamage
