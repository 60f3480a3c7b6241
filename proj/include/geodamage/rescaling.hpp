#pragma once

#include <utility>
#include <vector>

#include "geodamage/evolution.hpp"

namespace geodamage {

/// Increments of one original time step divided by its arc length.
struct KnotSlope {
  double ds = 0.0;
  double dt = 0.0, d_alpha_h1 = 0.0, d_e_l2 = 0.0, d_p_h1 = 0.0;

  double total() const { return ds > 0.0 ? (dt + d_alpha_h1 + d_e_l2 + d_p_h1) / ds : 0.0; }
};

struct Interval {
  double lo = 0.0, hi = 0.0;
  int first = 0, last = 0;  // grid interval indices, inclusive
};

/// A trajectory re-indexed by arc length s on [0, S].
struct RescaledTrajectory {
  double eps = 0.0;
  double T = 1.0;
  double S = 0.0;
  LoadProgram load;

  std::vector<double> knot_s;   // s at original time knots
  std::vector<State> knots;     // original states
  std::vector<KnotSlope> slopes;  // slopes[i] describes (knot i-1, knot i]

  std::vector<double> s;        // uniform grid
  std::vector<double> t0;
  std::vector<State> states;    // affine interpolants on the grid

  std::vector<Interval> plateaus;
  std::vector<char> on_plateau;  // per grid point

  /// Affine interpolation of the knot states at arc length s.
  State state_at(double sv) const;
  double time_at(double sv) const;
};

/// s_i = s_{i-1} + tau + |Dalpha|_H1 + |De|_2 + |Dp|_H1, resampled on a uniform
/// grid of n_grid intervals (0 picks 4k). Throws std::invalid_argument on
/// trajectories with fewer than two states.
RescaledTrajectory arclength_parametrize(const Trajectory& traj, const FeSpace& fe, int n_grid = 0);

/// Default plateau threshold 1e-6 T / S.
double default_plateau_threshold(const RescaledTrajectory& rt);

/// Maximal runs of at least min_intervals grid intervals where dt0/ds < threshold.
/// Stores the result in rt.plateaus / rt.on_plateau and returns it.
std::vector<Interval> detect_plateaus(RescaledTrajectory& rt, double threshold, int min_intervals = 3);

struct BvReport {
  double scale = 1.0;
  double t0_decrease = 0.0;        // max t0(s_j) - t0(s_{j+1}), positive part
  double t0_lipschitz = 0.0;       // max (dt0/ds - 1), positive part
  double alpha_increase = 0.0;     // max nodal alpha increase along s
  double alpha_box = 0.0;          // max distance of alpha from [0, 1]
  double bundle_excess = 0.0;      // max (|Dalpha|_H1 + |De|_2 + |Dp|_H1)/Ds - 1 on the grid
  double knot_slope_error = 0.0;   // max |total slope - 1| at original knots
  double kinematic = 0.0;          // |Bu - avg p - e| and boundary mismatch
  double equilibrium = 0.0;
  double stress = 0.0;
  double slope_outside = 0.0;      // max psi outside plateaus
  double slope_inside = 0.0;       // max psi on plateaus
  double balance_slack_min = 0.0;  // min over s of RHS - LHS of the rescaled energy inequality
  double balance_residual = 0.0;   // max |RHS - LHS|
  double generalized_kt = 0.0;     // max | -dE[alpha'] - |alpha'|_2 psi |
  double hill = 0.0;               // max |H(p') - S.p'| at interval ends
  int slope_positive_points = 0;   // grid points with psi > tol (the set A0)
  int slope_points_outside = 0;    // of which outside plateaus
  int plateau_count = 0;
  bool contained = true;           // A0 within U0
  double tol = 0.0;
  std::vector<double> slack;       // per grid point
  std::vector<double> psi;         // per grid point
};

/// Evaluates irreversibility, kinematics, stress constraint, slope condition
/// and energy balance on the rescaled grid. Report only; residuals absolute.
BvReport check_bv_conditions(const RescaledTrajectory& rt, const MaterialLaw& law, const FeSpace& fe,
                             double tol_rel = 1e-6);

enum class Alignment { affine, constant_extension };

struct ComparisonRow {
  double eps_a = 0.0, eps_b = 0.0;
  double distance = 0.0;
  double at = 0.0;  // normalized location of the sup
};

/// Sup distance (|Dalpha|_2 + |Dp|_2 + |De|_2 + |Dt0|) between consecutive
/// trajectories sampled on n_samples common points. Throws
/// std::invalid_argument if the trajectories do not share mesh and load.
std::vector<ComparisonRow> eps_limit_compare(const std::vector<const RescaledTrajectory*>& rts, const FeSpace& fe,
                                             Alignment align = Alignment::affine, int n_samples = 401);

}  // namespace geodamage
