#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geodamage/evolution.hpp"

namespace geodamage {

struct CheckReport {
  std::string id;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  int index = -1;  // time or grid index of the worst residual
  int node = -1;
  std::string condition;
};

CheckReport make_report(std::string id, double residual, double tolerance, int index, std::string condition,
                        int node = -1);

/// max(1, E(0), sup_t E(t)).
double energy_scale(const Trajectory& traj);

/// |E(t) + sum Hcal + eps int |alphadot|^2 - E(0) - int (Ce, Ewdot)| per step,
/// work by trapezoid.
std::vector<double> balance_residuals(const Trajectory& traj);
/// Passes when the sup residual is at most rate * tau * scale.
CheckReport check_energy_balance(const Trajectory& traj, double rate = 1.0);

CheckReport check_energy_inequality(const Trajectory& traj, double tol_rel = 1e-9);

/// Nodewise alpha_i <= alpha_{i-1} and 0 <= alpha <= 1, zero tolerance.
CheckReport check_irreversibility(const Trajectory& traj);

struct StabilityReport {
  CheckReport report;
  std::optional<State> worst;  // competitor achieving the worst violation
  int competitors = 0;
};

/// Tests E(state) <= E(competitor) + Hcal(q - p) against elastic relaxations,
/// scaled damage, plastic moves along the stress excess and random admissible
/// states with beta <= alpha. Samples at most max_times states.
StabilityReport check_global_stability(const Trajectory& traj, const IncrementalSolver& solver, int n_random = 8,
                                       std::uint64_t seed = 11, int max_times = 26, double tol_rel = 1e-8);
/// Worst violation of global stability at a single state.
StabilityReport stability_at(const State& s, const IncrementalSolver& solver, const LoadProgram& load, int n_random,
                             std::uint64_t seed);

CheckReport check_kuhn_tucker(const Trajectory& traj, double tol_rel = 1e-8);

/// Flow-rule residual |Hcal(pdot) - S_i . pdot| at the end of each step.
CheckReport check_hill(const Trajectory& traj, double tol_rel = 1e-8);
/// sup_i |Hcal(pdot) - S_{i-1} . pdot|; of order tau.
double hill_start_residual(const Trajectory& traj);
/// max_i |Hcal(pdot) - S_i . pdot| / (tau (|alphadot|_2^2 + |Ewdot|_2^2)).
double hill_correction_constant(const Trajectory& traj);

struct ContinuityReport {
  CheckReport report;
  double max_ratio = 0.0;    // state increments over alpha L1 change plus load
  double max_ratio_u = 0.0;  // displacement variant
  int pairs = 0;
  int zero_denominator = 0;
  int flagged = 0;
  double zero_den_numerator = 0.0;
};

struct PairIncrement {
  double numerator = 0.0, denominator = 0.0;
  double numerator_u = 0.0, denominator_u = 0.0;
};

/// Deterministic subsample of at most max_pairs index pairs i < j.
std::vector<std::pair<int, int>> continuity_pairs(int n_states, int max_pairs = 10000);
PairIncrement pair_increment(const Trajectory& traj, const FeSpace& fe, int i, int j);
ContinuityReport continuity_ratio(const Trajectory& traj, const FeSpace& fe, int max_pairs = 10000,
                                  double zero_tol = 1e-10);
/// Ratio bookkeeping shared with synthetic inputs.
ContinuityReport continuity_from(const std::vector<PairIncrement>& pairs, double zero_tol = 1e-10);

struct VariationalReport {
  CheckReport slope;       // dE/dalpha[beta] >= 0 for beta <= 0
  CheckReport stress;      // two-sided stress bound
  CheckReport quadratic;   // plastic-elastic comparison with beta = alpha
  bool energetic = true;
};
VariationalReport check_variational_inequalities(const Trajectory& traj, const IncrementalSolver& solver,
                                                 int n_random = 8, std::uint64_t seed = 13, int max_times = 26,
                                                 double tol_rel = 1e-8);

/// r_eff sum |Dp|_1 <= sum Hcal(Dp).
CheckReport check_dissipation_bound(const Trajectory& traj, const MaterialLaw& law, const FeSpace& fe,
                                    double tol_rel = 1e-10);

CheckReport check_stress_constraint(const Trajectory& traj, double tol_rel = 1e-8);
CheckReport check_equilibrium(const Trajectory& traj, double tol_rel = 1e-8);

struct SuiteOptions {
  double balance_rate = 0.01;
  int n_random = 8;
  std::uint64_t seed = 11;
};

/// Every check that applies to the trajectory's mode (energetic or viscous).
std::vector<CheckReport> run_check_suite(const Trajectory& traj, const IncrementalSolver& solver,
                                         const SuiteOptions& opt = {});

}  // namespace geodamage
