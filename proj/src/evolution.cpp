#include "geodamage/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace geodamage {

void LoadProgram::validate() const {
  if (!(T > 0.0)) throw std::invalid_argument("load.T must be > 0");
  for (std::size_t i = 1; i < ramp_table.size(); ++i)
    if (!(ramp_table[i].first > ramp_table[i - 1].first))
      throw std::invalid_argument("load ramp table times must be strictly increasing");
  if (!G.allFinite()) throw std::invalid_argument("load.G must be finite");
}

double LoadProgram::ramp(double t) const {
  if (ramp_table.empty()) return t;
  if (t <= ramp_table.front().first) return ramp_table.front().second;
  if (t >= ramp_table.back().first) return ramp_table.back().second;
  const auto it = std::upper_bound(ramp_table.begin(), ramp_table.end(), t,
                                   [](double v, const auto& knot) { return v < knot.first; });
  const auto& [t1, v1] = *it;
  const auto& [t0, v0] = *(it - 1);
  return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
}

double LoadProgram::ramp_rate_sq_integral(double a, double b) const {
  if (ramp_table.empty()) return b - a;
  double s = 0.0;
  for (std::size_t i = 1; i < ramp_table.size(); ++i) {
    const auto& [t0, v0] = ramp_table[i - 1];
    const auto& [t1, v1] = ramp_table[i];
    const double lo = std::max(a, t0), hi = std::min(b, t1);
    if (hi <= lo) continue;
    const double slope = (v1 - v0) / (t1 - t0);
    s += slope * slope * (hi - lo);
  }
  return s;
}

SymTensor2 LoadProgram::sym_g() const {
  return SymTensor2::from_matrix({{{G(0, 0), G(0, 1)}, {G(1, 0), G(1, 1)}}});
}

double LoadProgram::sym_norm() const { return sym_g().norm(); }

std::vector<Vec> Trajectory::plastic_history() const {
  std::vector<Vec> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(s.p);
  return out;
}

double delta_k(const LoadProgram& load, const HookeLaw& hooke, double measure, int k) {
  const double tau = load.T / k;
  const double g = load.sym_norm();
  return tau * 0.5 * hooke.gamma2(2) * g * g * measure * load.ramp_rate_sq_integral(0.0, load.T);
}

namespace {

Vec uniform_strain(const FeSpace& fe, const SymTensor2& s) {
  Vec e(kVoigt * fe.n_elements());
  for (int t = 0; t < fe.n_elements(); ++t) set_tensor(e, t, s);
  return e;
}

StepRecord make_record(const Trajectory& traj, int i, const MaterialLaw& law, const FeSpace& fe,
                       const StepRecord* previous, double delta) {
  StepRecord r;
  const State& s = traj.states[i];
  r.index = i;
  r.t = s.t;
  r.energy = total_energy(s, law, fe);
  r.stress_residual = stress_constraint_residual(s, law, fe);
  r.equilibrium = equilibrium_residual(s, law.hooke, fe);
  r.psi = psi_slope(s, law, fe);
  if (i == 0) {
    r.lhs = r.energy.total;
    r.rhs = r.energy.total + delta;
    r.slack = r.rhs - r.lhs;
    return r;
  }
  const State& prev = traj.states[i - 1];
  const double tau = traj.tau();
  const double eps = traj.eps;
  const Vec dp = s.p - prev.p;
  const Vec da = s.alpha - prev.alpha;
  const ExtReal h = plastic_potential(dp, law.constraint, fe);
  r.dissipation_infinite = h.is_infinite();
  r.dissipation = h.value();
  const double da_sq = da.dot(fe.mass() * da);
  r.viscous = eps / (2.0 * tau) * da_sq;
  const double dramp = traj.load.ramp(s.t) - traj.load.ramp(prev.t);
  const Vec dw = uniform_strain(fe, dramp * traj.load.sym_g());
  r.work = elastic_product(prev.e, dw, law.hooke, fe);
  r.work_end = elastic_product(s.e, dw, law.hooke, fe);
  r.d_w_strain = fe.strain_norm(dw);

  const Vec g = alpha_gradient(s, law, fe);
  r.kt_residual = std::abs(g.dot(da) / tau + eps * da_sq / (tau * tau));
  const Vec S_prev = generalized_stress(prev, law, fe);
  const Vec S_end = generalized_stress(s, law, fe);
  r.hill_start = std::abs(h.value() - S_prev.dot(dp)) / tau;
  r.hill_end = std::abs(h.value() - S_end.dot(dp)) / tau;

  r.d_alpha_l2 = std::sqrt(std::max(0.0, da_sq));
  r.d_alpha_h1 = fe.scalar_norm(da, NormKind::H1);
  r.d_alpha_l1 = fe.scalar_norm(da, NormKind::L1);
  r.d_e_l2 = fe.strain_norm(s.e - prev.e);
  r.d_p_h1 = fe.tensor_norm(dp, NormKind::H1);
  r.d_p_l1 = fe.tensor_norm(dp, NormKind::L1);
  r.d_u_h1 = fe.displacement_norm(s.u - prev.u, NormKind::H1);

  const double cum_diss = previous->lhs - previous->energy.total + r.dissipation + r.viscous;
  r.lhs = r.energy.total + cum_diss;
  r.rhs = previous->rhs + r.work;
  r.slack = r.rhs - r.lhs;
  return r;
}

}  // namespace

void fill_records(Trajectory& traj, const MaterialLaw& law, const FeSpace& fe) {
  const double delta = delta_k(traj.load, law.hooke, fe.measure(), traj.k);
  std::vector<StepRecord> old = std::move(traj.steps);
  traj.steps.clear();
  for (int i = 0; i < static_cast<int>(traj.states.size()); ++i) {
    StepRecord r = make_record(traj, i, law, fe, i ? &traj.steps.back() : nullptr, delta);
    if (i < static_cast<int>(old.size())) {
      r.plastic_residual = old[i].plastic_residual;
      r.damage_kkt = old[i].damage_kkt;
      r.sweeps = old[i].sweeps;
      r.start = old[i].start;
      r.flagged = old[i].flagged;
      r.monotone = old[i].monotone;
    }
    traj.steps.push_back(r);
  }
}

State make_initial_state(const LoadProgram& load, const IncrementalSolver& solver) {
  const FeSpace& fe = solver.space();
  const Vec lift0 = fe.lift(load.G, load.ramp(0.0));
  State s0 = solver.elastic_state(Vec::Ones(fe.n_nodes()), Vec::Zero(kVoigt * fe.n_nodes()), lift0, 0.0);
  const StepResult check = solver.incremental_minimize(s0, 0.0, lift0, 0.0, 1.0);
  const double e0 = solver.incremental_objective(s0, s0, 0.0, 1.0);
  const double gap = e0 - check.objective;
  const double scale = std::max(1.0, e0);
  if (gap > 1e-9 * scale)
    throw InitialStateError("initial state is not globally stable: a competitor lowers the energy", check.state, gap);
  return s0;
}

Trajectory run_evolution(const LoadProgram& load, const IncrementalSolver& solver, int k, double eps,
                         double slack_tol, const StepCallback& on_step) {
  if (k < 1) throw std::invalid_argument("time.k must be >= 1");
  if (eps < 0.0) throw std::invalid_argument("viscosity epsilon must be >= 0");
  load.validate();
  const FeSpace& fe = solver.space();
  const MaterialLaw& law = solver.law();
  Trajectory traj;
  traj.eps = eps;
  traj.k = k;
  traj.load = load;
  const double tau = load.T / k;
  const double delta = delta_k(load, law.hooke, fe.measure(), k);

  traj.states.push_back(make_initial_state(load, solver));
  traj.steps.push_back(make_record(traj, 0, law, fe, nullptr, delta));
  if (on_step) on_step(traj.steps.back());
  double scale = std::max(1.0, traj.steps[0].energy.total);

  for (int i = 1; i <= k; ++i) {
    const double t = i * tau;
    const StepResult step = solver.incremental_minimize(traj.states.back(), t, fe.lift(load.G, load.ramp(t)), eps, tau);
    traj.states.push_back(step.state);
    StepRecord r = make_record(traj, i, law, fe, &traj.steps.back(), delta);
    r.plastic_residual = step.plastic_residual;
    r.damage_kkt = step.damage_kkt;
    r.sweeps = step.sweeps;
    r.start = step.start_index;
    r.flagged = step.flagged;
    r.monotone = step.monotone;
    scale = std::max(scale, r.energy.total);
    traj.steps.push_back(r);
    if (on_step) on_step(r);
    if (r.slack < -slack_tol * scale)
      throw SolverFailure("discrete energy inequality violated at step " + std::to_string(i), r.slack);
  }
  return traj;
}

Trajectory run_viscous(const LoadProgram& load, const IncrementalSolver& solver, int k, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("viscous run needs epsilon > 0");
  return run_evolution(load, solver, k, eps);
}

std::vector<EnergyReportRow> discrete_energy_report(const Trajectory& traj) {
  std::vector<EnergyReportRow> rows;
  rows.reserve(traj.steps.size());
  for (const auto& r : traj.steps) rows.push_back({r.index, r.t, r.lhs, r.rhs, r.slack});
  return rows;
}

double uniform_bound(const Trajectory& traj, const FeSpace& fe) {
  double best = 0.0;
  for (const auto& s : traj.states) {
    const double v = fe.scalar_norm(s.alpha, NormKind::H1) + fe.displacement_norm(s.u, NormKind::H1) +
                     fe.strain_norm(s.e) + fe.tensor_norm(s.p, NormKind::H1);
    best = std::max(best, v);
  }
  return best;
}

ViscousTotals viscous_totals(const Trajectory& traj) {
  ViscousTotals v;
  const double tau = traj.tau();
  for (std::size_t i = 1; i < traj.steps.size(); ++i) {
    const auto& r = traj.steps[i];
    v.alpha_rate_h1 += r.d_alpha_h1;
    v.alpha_rate_h1_sq += r.d_alpha_h1 * r.d_alpha_h1 / tau;
    v.alpha_rate_l2_sq += r.d_alpha_l2 * r.d_alpha_l2 / tau;
    const double omega = r.d_alpha_l2 + r.d_w_strain;
    if (omega > 0.0) v.max_increment_ratio = std::max(v.max_increment_ratio, (r.d_e_l2 + r.d_p_h1) / omega);
  }
  return v;
}

}  // namespace geodamage
