#include "geodamage/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <tuple>

namespace geodamage {

namespace {

constexpr double kZeroDenominator = 1e-14;

std::vector<int> sample_indices(int n_states, int max_times) {
  std::vector<int> out;
  if (n_states <= 0) return out;
  if (max_times <= 1 || n_states <= max_times) {
    for (int i = 0; i < n_states; ++i) out.push_back(i);
    return out;
  }
  for (int m = 0; m < max_times; ++m) {
    const int i = static_cast<int>(std::lround(static_cast<double>(m) * (n_states - 1) / (max_times - 1)));
    if (out.empty() || out.back() != i) out.push_back(i);
  }
  return out;
}

double ramp_variation(const LoadProgram& load, double a, double b) {
  if (load.ramp_table.empty()) return b - a;
  double v = 0.0;
  for (std::size_t i = 1; i < load.ramp_table.size(); ++i) {
    const auto& [t0, v0] = load.ramp_table[i - 1];
    const auto& [t1, v1] = load.ramp_table[i];
    const double lo = std::max(a, t0), hi = std::min(b, t1);
    if (hi > lo) v += std::abs(v1 - v0) / (t1 - t0) * (hi - lo);
  }
  return v;
}

double lumped_tensor_norm(const Vec& q, const FeSpace& fe) {
  double acc = 0.0;
  for (int i = 0; i < fe.n_nodes(); ++i) acc += fe.lumped()[i] * q.segment<3>(kVoigt * i).squaredNorm();
  return std::sqrt(acc);
}

// Elastic, hardening and plastic-gradient parts of the energy.
double plastic_elastic_energy(const Vec& alpha, const Vec& e, const Vec& p, const MaterialLaw& law,
                              const FeSpace& fe) {
  State s;
  s.alpha = alpha;
  s.e = e;
  s.p = p;
  const EnergyBreakdown E = total_energy(s, law, fe);
  return E.elastic + E.hardening + E.grad_p;
}

struct Competitor {
  Vec alpha, p;
};

// Competitor fields (beta, q) for a state; (u, eta) follow by elastic relaxation.
std::vector<Competitor> competitor_family(const State& s, const IncrementalSolver& solver, int n_random,
                                          std::uint64_t seed, bool fixed_alpha) {
  const FeSpace& fe = solver.space();
  const ConstraintSet& K = solver.law().constraint;
  std::vector<Competitor> out;
  out.push_back({s.alpha, s.p});
  out.push_back({s.alpha, Vec::Zero(s.p.size())});
  if (!fixed_alpha)
    for (double c : {0.9, 0.5, 0.0}) out.push_back({c * s.alpha, s.p});

  for (double d : {0.01, 0.1}) {
    out.push_back({s.alpha, (1.0 + d) * s.p});
    out.push_back({s.alpha, (1.0 - d) * s.p});
  }
  const Vec S = generalized_stress(s, solver.law(), fe);
  Vec excess(s.p.size());
  for (int i = 0; i < fe.n_nodes(); ++i) set_tensor(excess, i, K.prox(tensor_at(S, i) / fe.lumped()[i], 1.0));
  const double en = lumped_tensor_norm(excess, fe);
  const double size = std::max({lumped_tensor_norm(s.p, fe), fe.strain_norm(s.e), 1e-3});
  if (en > 0.0)
    for (double d : {1e-4, 1e-3, 1e-2, 1e-1}) out.push_back({s.alpha, s.p + (d * size / en) * excess});

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  for (int r = 0; r < n_random; ++r) {
    Vec beta = s.alpha;
    if (!fixed_alpha)
      for (Eigen::Index i = 0; i < beta.size(); ++i) beta[i] *= 0.5 + 0.5 * unit(rng);
    Vec dq(s.p.size());
    for (int i = 0; i < fe.n_nodes(); ++i) {
      SymTensor2 x{{normal(rng), normal(rng), normal(rng)}};
      if (K.kind() == ConstraintKind::drucker_prager) x = K.project_cone(x);
      set_tensor(dq, i, x);
    }
    const double dn = lumped_tensor_norm(dq, fe);
    const double amp = size * std::pow(10.0, -3.0 + 2.0 * unit(rng));
    if (dn > 0.0) out.push_back({beta, s.p + (amp / dn) * dq});
  }
  return out;
}

}  // namespace

CheckReport make_report(std::string id, double residual, double tolerance, int index, std::string condition,
                        int node) {
  CheckReport r;
  r.id = std::move(id);
  r.residual = residual;
  r.tolerance = tolerance;
  r.pass = std::isfinite(residual) && residual <= tolerance;
  r.index = index;
  r.node = node;
  r.condition = std::move(condition);
  return r;
}

double energy_scale(const Trajectory& traj) {
  double s = 1.0;
  for (const auto& r : traj.steps) s = std::max(s, r.energy.total);
  return s;
}

std::vector<double> balance_residuals(const Trajectory& traj) {
  std::vector<double> out(traj.steps.size(), 0.0);
  if (traj.steps.empty()) return out;
  const double e0 = traj.steps[0].energy.total;
  double diss = 0.0, work = 0.0;
  for (std::size_t i = 1; i < traj.steps.size(); ++i) {
    const auto& r = traj.steps[i];
    diss += r.dissipation + 2.0 * r.viscous;
    work += 0.5 * (r.work + r.work_end);
    out[i] = std::abs(r.energy.total + diss - e0 - work);
  }
  return out;
}

CheckReport check_energy_balance(const Trajectory& traj, double rate) {
  const std::vector<double> res = balance_residuals(traj);
  int at = 0;
  for (std::size_t i = 0; i < res.size(); ++i)
    if (res[i] > res[at]) at = static_cast<int>(i);
  const double worst = res.empty() ? 0.0 : res[at];
  return make_report("energy_balance", worst, rate * traj.tau() * energy_scale(traj), at,
                     "energy-dissipation balance");
}

CheckReport check_energy_inequality(const Trajectory& traj, double tol_rel) {
  double worst = 0.0;
  int at = 0;
  for (const auto& r : traj.steps)
    if (-r.slack > worst) {
      worst = -r.slack;
      at = r.index;
    }
  return make_report("energy_inequality", worst, tol_rel * energy_scale(traj), at, "discrete energy inequality");
}

CheckReport check_irreversibility(const Trajectory& traj) {
  double worst = 0.0;
  int at = 0, node = -1;
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const Vec& a = traj.states[i].alpha;
    for (Eigen::Index n = 0; n < a.size(); ++n) {
      double v = std::max(-a[n], a[n] - 1.0);
      if (i > 0) v = std::max(v, a[n] - traj.states[i - 1].alpha[n]);
      if (!(v <= worst)) {
        worst = std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
        at = static_cast<int>(i);
        node = static_cast<int>(n);
      }
    }
  }
  return make_report("irreversibility", worst, 0.0, at, "damage nonincreasing and in [0,1]", node);
}

StabilityReport stability_at(const State& s, const IncrementalSolver& solver, const LoadProgram& load, int n_random,
                             std::uint64_t seed) {
  const FeSpace& fe = solver.space();
  const MaterialLaw& law = solver.law();
  const Vec lift = fe.lift(load.G, load.ramp(s.t));
  const double e_state = total_energy(s, law, fe).total;
  StabilityReport out;
  out.report = make_report("global_stability", 0.0, 0.0, -1, "global stability");
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& c : competitor_family(s, solver, n_random, seed, false)) {
    const ExtReal h = plastic_potential(c.p - s.p, law.constraint, fe);
    if (h.is_infinite()) continue;
    State comp = solver.elastic_state(c.alpha, c.p, lift, s.t);
    const double gap = e_state - (total_energy(comp, law, fe).total + h.value());
    ++out.competitors;
    if (gap > worst) {
      worst = gap;
      out.worst = std::move(comp);
    }
  }
  out.report.residual = std::max(0.0, worst);
  return out;
}

StabilityReport check_global_stability(const Trajectory& traj, const IncrementalSolver& solver, int n_random,
                                       std::uint64_t seed, int max_times, double tol_rel) {
  StabilityReport out;
  double worst = 0.0;
  int at = 0;
  for (int i : sample_indices(static_cast<int>(traj.states.size()), max_times)) {
    StabilityReport r = stability_at(traj.states[i], solver, traj.load, n_random, seed + static_cast<std::uint64_t>(i));
    out.competitors += r.competitors;
    if (r.report.residual > worst || !out.worst) {
      if (r.report.residual > worst) {
        worst = r.report.residual;
        at = i;
      }
      out.worst = std::move(r.worst);
    }
  }
  out.report = make_report("global_stability", worst, tol_rel * energy_scale(traj), at, "global stability");
  return out;
}

CheckReport check_kuhn_tucker(const Trajectory& traj, double tol_rel) {
  double worst = 0.0;
  int at = 0;
  for (const auto& r : traj.steps)
    if (r.kt_residual > worst) {
      worst = r.kt_residual;
      at = r.index;
    }
  return make_report("kuhn_tucker", worst, tol_rel * energy_scale(traj), at, "damage Kuhn-Tucker equality");
}

CheckReport check_hill(const Trajectory& traj, double tol_rel) {
  double worst = 0.0;
  int at = 0;
  for (const auto& r : traj.steps)
    if (r.hill_end > worst) {
      worst = r.hill_end;
      at = r.index;
    }
  return make_report("hill", worst, tol_rel * energy_scale(traj), at, "maximum plastic work");
}

double hill_start_residual(const Trajectory& traj) {
  double worst = 0.0;
  for (const auto& r : traj.steps) worst = std::max(worst, r.hill_start);
  return worst;
}

double hill_correction_constant(const Trajectory& traj) {
  const double tau = traj.tau();
  double c = 0.0;
  for (std::size_t i = 1; i < traj.steps.size(); ++i) {
    const auto& r = traj.steps[i];
    const double rate = (r.d_alpha_l2 * r.d_alpha_l2 + r.d_w_strain * r.d_w_strain) / (tau * tau);
    if (tau * rate > 0.0) c = std::max(c, r.hill_end / (tau * rate));
  }
  return c;
}

std::vector<std::pair<int, int>> continuity_pairs(int n_states, int max_pairs) {
  std::vector<std::pair<int, int>> out;
  const long long total = static_cast<long long>(n_states) * (n_states - 1) / 2;
  if (total <= 0) return out;
  const long long stride = std::max<long long>(1, (total + max_pairs - 1) / max_pairs);
  long long k = 0;
  for (int i = 0; i < n_states; ++i)
    for (int j = i + 1; j < n_states; ++j, ++k)
      if (k % stride == 0) out.emplace_back(i, j);
  return out;
}

PairIncrement pair_increment(const Trajectory& traj, const FeSpace& fe, int i, int j) {
  const State& a = traj.states[i];
  const State& b = traj.states[j];
  PairIncrement p;
  const Vec da = b.alpha - a.alpha;
  const double dl1 = fe.scalar_norm(da, NormKind::L1);
  const double var = ramp_variation(traj.load, a.t, b.t);
  p.numerator = fe.scalar_norm(da, NormKind::H1) + fe.strain_norm(b.e - a.e) + fe.tensor_norm(b.p - a.p, NormKind::H1);
  p.denominator = dl1 + var * traj.load.sym_norm() * std::sqrt(fe.measure());
  p.numerator_u = fe.displacement_norm(b.u - a.u, NormKind::H1);
  p.denominator_u = dl1 + var * fe.displacement_norm(fe.lift(traj.load.G, 1.0), NormKind::H1);
  return p;
}

ContinuityReport continuity_from(const std::vector<PairIncrement>& pairs, double zero_tol) {
  ContinuityReport r;
  r.pairs = static_cast<int>(pairs.size());
  int worst_at = -1;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& p = pairs[k];
    bool zero = false;
    for (auto [num, den, slot] : {std::tuple{p.numerator, p.denominator, &r.max_ratio},
                                  std::tuple{p.numerator_u, p.denominator_u, &r.max_ratio_u}}) {
      if (den <= kZeroDenominator) {
        zero = true;
        r.zero_den_numerator = std::max(r.zero_den_numerator, num);
        if (num > zero_tol) {
          ++r.flagged;
          worst_at = static_cast<int>(k);
        }
      } else {
        *slot = std::max(*slot, num / den);
      }
    }
    if (zero) ++r.zero_denominator;
  }
  r.report = make_report("continuity", r.zero_den_numerator, zero_tol, worst_at, "continuity estimate");
  r.report.pass = r.flagged == 0 && std::isfinite(r.max_ratio) && std::isfinite(r.max_ratio_u);
  return r;
}

ContinuityReport continuity_ratio(const Trajectory& traj, const FeSpace& fe, int max_pairs, double zero_tol) {
  std::vector<PairIncrement> inc;
  for (auto [i, j] : continuity_pairs(static_cast<int>(traj.states.size()), max_pairs))
    inc.push_back(pair_increment(traj, fe, i, j));
  return continuity_from(inc, zero_tol);
}

VariationalReport check_variational_inequalities(const Trajectory& traj, const IncrementalSolver& solver,
                                                 int n_random, std::uint64_t seed, int max_times, double tol_rel) {
  const FeSpace& fe = solver.space();
  const MaterialLaw& law = solver.law();
  const double tol = tol_rel * energy_scale(traj);
  VariationalReport out;
  out.energetic = traj.eps == 0.0;

  double slope = 0.0, stress = 0.0, quad = 0.0;
  int at_slope = 0, at_stress = 0, at_quad = 0;
  for (const auto& r : traj.steps) {
    if (r.psi > slope) {
      slope = r.psi;
      at_slope = r.index;
    }
    const double s = std::max(r.stress_residual, r.equilibrium);
    if (s > stress) {
      stress = s;
      at_stress = r.index;
    }
  }
  for (int i : sample_indices(static_cast<int>(traj.states.size()), max_times)) {
    const State& s = traj.states[i];
    const Vec lift = fe.lift(traj.load.G, traj.load.ramp(s.t));
    const double base = plastic_elastic_energy(s.alpha, s.e, s.p, law, fe);
    for (const auto& c : competitor_family(s, solver, n_random, seed + static_cast<std::uint64_t>(i), true)) {
      const ExtReal h = plastic_potential(c.p - s.p, law.constraint, fe);
      if (h.is_infinite()) continue;
      const State comp = solver.elastic_state(s.alpha, c.p, lift, s.t);
      const double lhs = base + plastic_elastic_energy(s.alpha, comp.e - s.e, comp.p - s.p, law, fe);
      const double rhs = plastic_elastic_energy(s.alpha, comp.e, comp.p, law, fe) + h.value();
      if (lhs - rhs > quad) {
        quad = lhs - rhs;
        at_quad = i;
      }
    }
  }
  out.slope = make_report("variational_slope", slope, tol, at_slope,
                          out.energetic ? "damage slope nonnegative" : "damage slope nonnegative (viscous run)");
  out.stress = make_report("variational_stress", stress, tol, at_stress, "two-sided stress bound");
  out.quadratic = make_report("variational_plastic", quad, tol, at_quad, "plastic comparison at fixed damage");
  return out;
}

CheckReport check_dissipation_bound(const Trajectory& traj, const MaterialLaw& law, const FeSpace& fe,
                                    double tol_rel) {
  const double r_eff = law.constraint.r_eff();
  double lhs = 0.0, rhs = 0.0, worst = 0.0;
  int at = 0;
  for (std::size_t i = 1; i < traj.states.size(); ++i) {
    const Vec dp = traj.states[i].p - traj.states[i - 1].p;
    lhs += r_eff * fe.tensor_norm(dp, NormKind::L1);
    const ExtReal h = plastic_potential(dp, law.constraint, fe);
    rhs += h.is_infinite() ? std::numeric_limits<double>::infinity() : h.value();
    if (lhs - rhs > worst) {
      worst = lhs - rhs;
      at = static_cast<int>(i);
    }
  }
  return make_report("dissipation_bound", worst, tol_rel * energy_scale(traj), at,
                     "dissipation dominates plastic variation");
}

CheckReport check_stress_constraint(const Trajectory& traj, double tol_rel) {
  double worst = 0.0;
  int at = 0;
  for (const auto& r : traj.steps)
    if (r.stress_residual > worst) {
      worst = r.stress_residual;
      at = r.index;
    }
  return make_report("stress_constraint", worst, tol_rel * energy_scale(traj), at, "stress constraint");
}

CheckReport check_equilibrium(const Trajectory& traj, double tol_rel) {
  double worst = 0.0;
  int at = 0;
  for (const auto& r : traj.steps)
    if (r.equilibrium > worst) {
      worst = r.equilibrium;
      at = r.index;
    }
  return make_report("equilibrium", worst, tol_rel * energy_scale(traj), at, "elastic equilibrium");
}

std::vector<CheckReport> run_check_suite(const Trajectory& traj, const IncrementalSolver& solver,
                                         const SuiteOptions& opt) {
  const FeSpace& fe = solver.space();
  std::vector<CheckReport> out;
  out.push_back(check_irreversibility(traj));
  out.push_back(check_energy_inequality(traj));
  out.push_back(check_energy_balance(traj, opt.balance_rate));
  out.push_back(check_stress_constraint(traj));
  out.push_back(check_equilibrium(traj));
  out.push_back(check_dissipation_bound(traj, solver.law(), fe));
  out.push_back(check_hill(traj));
  if (traj.eps == 0.0) {
    out.push_back(check_global_stability(traj, solver, opt.n_random, opt.seed).report);
    const VariationalReport v = check_variational_inequalities(traj, solver, opt.n_random, opt.seed + 1);
    out.push_back(v.slope);
    out.push_back(v.stress);
    out.push_back(v.quadratic);
    out.push_back(continuity_ratio(traj, fe).report);
  } else {
    out.push_back(check_kuhn_tucker(traj));
  }
  return out;
}

}  // namespace geodamage
