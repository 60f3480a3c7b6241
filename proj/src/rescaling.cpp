#include "geodamage/rescaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace geodamage {

namespace {

State blend(const State& a, const State& b, double w) {
  State s;
  s.t = (1.0 - w) * a.t + w * b.t;
  s.alpha = (1.0 - w) * a.alpha + w * b.alpha;
  s.u = (1.0 - w) * a.u + w * b.u;
  s.e = (1.0 - w) * a.e + w * b.e;
  s.p = (1.0 - w) * a.p + w * b.p;
  return s;
}

// Index i with knot_s[i-1] <= s <= knot_s[i], and the blend weight.
std::pair<std::size_t, double> locate(const std::vector<double>& knot_s, double sv) {
  if (sv <= knot_s.front()) return {1, 0.0};
  if (sv >= knot_s.back()) return {knot_s.size() - 1, 1.0};
  auto it = std::upper_bound(knot_s.begin(), knot_s.end(), sv);
  const std::size_t i = static_cast<std::size_t>(it - knot_s.begin());
  const double w = (sv - knot_s[i - 1]) / (knot_s[i] - knot_s[i - 1]);
  return {i, std::clamp(w, 0.0, 1.0)};
}

Vec uniform_strain(const FeSpace& fe, const SymTensor2& s) {
  Vec e(kVoigt * fe.n_elements());
  for (int t = 0; t < fe.n_elements(); ++t) set_tensor(e, t, s);
  return e;
}

}  // namespace

State RescaledTrajectory::state_at(double sv) const {
  const auto [i, w] = locate(knot_s, sv);
  return blend(knots[i - 1], knots[i], w);
}

double RescaledTrajectory::time_at(double sv) const {
  const auto [i, w] = locate(knot_s, sv);
  return (1.0 - w) * knots[i - 1].t + w * knots[i].t;
}

RescaledTrajectory arclength_parametrize(const Trajectory& traj, const FeSpace& fe, int n_grid) {
  if (traj.states.size() < 2) throw std::invalid_argument("rescaling needs at least one time step");
  RescaledTrajectory rt;
  rt.eps = traj.eps;
  rt.T = traj.load.T;
  rt.load = traj.load;
  rt.knots = traj.states;
  rt.knot_s.assign(1, 0.0);
  rt.slopes.assign(1, KnotSlope{});
  for (std::size_t i = 1; i < traj.states.size(); ++i) {
    const State& a = traj.states[i - 1];
    const State& b = traj.states[i];
    KnotSlope k;
    k.dt = b.t - a.t;
    k.d_alpha_h1 = fe.scalar_norm(b.alpha - a.alpha, NormKind::H1);
    k.d_e_l2 = fe.strain_norm(b.e - a.e);
    k.d_p_h1 = fe.tensor_norm(b.p - a.p, NormKind::H1);
    k.ds = k.dt + k.d_alpha_h1 + k.d_e_l2 + k.d_p_h1;
    if (!(k.ds > 0.0)) throw std::invalid_argument("rescaling needs strictly increasing times");
    rt.knot_s.push_back(rt.knot_s.back() + k.ds);
    rt.slopes.push_back(k);
  }
  rt.S = rt.knot_s.back();

  const int n = n_grid > 0 ? n_grid : 4 * static_cast<int>(traj.states.size() - 1);
  rt.s.resize(n + 1);
  rt.t0.resize(n + 1);
  rt.states.resize(n + 1);
  for (int j = 0; j <= n; ++j) {
    const double sv = j == n ? rt.S : rt.S * j / n;
    rt.s[j] = sv;
    rt.states[j] = rt.state_at(sv);
    rt.t0[j] = rt.states[j].t;
  }
  rt.t0.front() = traj.states.front().t;
  rt.t0.back() = traj.states.back().t;
  rt.on_plateau.assign(n + 1, 0);
  return rt;
}

double default_plateau_threshold(const RescaledTrajectory& rt) { return 1e-6 * rt.T / rt.S; }

std::vector<Interval> detect_plateaus(RescaledTrajectory& rt, double threshold, int min_intervals) {
  rt.plateaus.clear();
  rt.on_plateau.assign(rt.s.size(), 0);
  const int n = static_cast<int>(rt.s.size()) - 1;
  int j = 0;
  while (j < n) {
    auto flat = [&](int m) { return (rt.t0[m + 1] - rt.t0[m]) / (rt.s[m + 1] - rt.s[m]) < threshold; };
    if (!flat(j)) {
      ++j;
      continue;
    }
    int last = j;
    while (last + 1 < n && flat(last + 1)) ++last;
    if (last - j + 1 >= min_intervals) {
      rt.plateaus.push_back({rt.s[j], rt.s[last + 1], j, last});
      for (int m = j; m <= last + 1; ++m) rt.on_plateau[m] = 1;
    }
    j = last + 1;
  }
  return rt.plateaus;
}

BvReport check_bv_conditions(const RescaledTrajectory& rt, const MaterialLaw& law, const FeSpace& fe,
                             double tol_rel) {
  BvReport r;
  const int n = static_cast<int>(rt.s.size()) - 1;
  const SymTensor2 gsym = rt.load.sym_g();

  std::vector<double> energy(n + 1);
  r.psi.resize(n + 1);
  double scale = 1.0;
  for (int j = 0; j <= n; ++j) {
    const State& st = rt.states[j];
    energy[j] = total_energy(st, law, fe).total;
    scale = std::max(scale, energy[j]);
    r.psi[j] = psi_slope(st, law, fe);

    for (Eigen::Index i = 0; i < st.alpha.size(); ++i)
      r.alpha_box = std::max({r.alpha_box, -st.alpha[i], st.alpha[i] - 1.0});
    const Vec kin = fe.strain_of(st.u) - fe.average(st.p) - st.e;
    double k = kin.size() ? kin.cwiseAbs().maxCoeff() : 0.0;
    const Vec w = fe.lift(rt.load.G, rt.load.ramp(rt.t0[j]));
    for (int a = 0; a < fe.n_u_nodes(); ++a)
      if (fe.u_fixed(a))
        k = std::max({k, std::abs(st.u[2 * a] - w[2 * a]), std::abs(st.u[2 * a + 1] - w[2 * a + 1])});
    r.kinematic = std::max(r.kinematic, k);
    r.equilibrium = std::max(r.equilibrium, equilibrium_residual(st, law.hooke, fe));
    r.stress = std::max(r.stress, stress_constraint_residual(st, law, fe));
  }
  r.scale = scale;
  r.tol = tol_rel * scale;

  for (std::size_t i = 1; i < rt.slopes.size(); ++i)
    r.knot_slope_error = std::max(r.knot_slope_error, std::abs(rt.slopes[i].total() - 1.0));

  r.slack.assign(n + 1, 0.0);
  double diss = 0.0, slope_term = 0.0, work = 0.0;
  r.balance_slack_min = 0.0;
  for (int j = 0; j < n; ++j) {
    const State& a = rt.states[j];
    const State& b = rt.states[j + 1];
    const double ds = rt.s[j + 1] - rt.s[j];
    const double dt0 = rt.t0[j + 1] - rt.t0[j];
    r.t0_decrease = std::max(r.t0_decrease, -dt0);
    r.t0_lipschitz = std::max(r.t0_lipschitz, dt0 / ds - 1.0);
    const Vec da = b.alpha - a.alpha;
    if (da.size()) r.alpha_increase = std::max(r.alpha_increase, da.maxCoeff());
    const Vec dp = b.p - a.p;
    const double bundle = fe.scalar_norm(da, NormKind::H1) + fe.strain_norm(b.e - a.e) + fe.tensor_norm(dp, NormKind::H1);
    r.bundle_excess = std::max(r.bundle_excess, bundle / ds - 1.0);

    const ExtReal h = plastic_potential(dp, law.constraint, fe);
    diss += h.is_infinite() ? std::numeric_limits<double>::infinity() : h.value();
    const double da_l2 = fe.scalar_norm(da, NormKind::L2);
    if (da_l2 > 0.0) slope_term += 0.5 * (r.psi[j] + r.psi[j + 1]) * da_l2;
    const Vec dw = uniform_strain(fe, (rt.load.ramp(rt.t0[j + 1]) - rt.load.ramp(rt.t0[j])) * gsym);
    work += 0.5 * (elastic_product(a.e, dw, law.hooke, fe) + elastic_product(b.e, dw, law.hooke, fe));
    const double slack = energy[0] + work - energy[j + 1] - diss - slope_term;
    r.slack[j + 1] = slack;
    r.balance_slack_min = std::min(r.balance_slack_min, slack);
    r.balance_residual = std::max(r.balance_residual, std::abs(slack));

    const Vec g = alpha_gradient(b, law, fe);
    r.generalized_kt = std::max(r.generalized_kt, std::abs(-g.dot(da) - da_l2 * r.psi[j + 1]) / ds);
    const Vec S = generalized_stress(b, law, fe);
    if (!h.is_infinite()) r.hill = std::max(r.hill, std::abs(h.value() - S.dot(dp)) / ds);
  }

  r.plateau_count = static_cast<int>(rt.plateaus.size());
  for (int j = 0; j <= n; ++j) {
    const bool flat = !rt.on_plateau.empty() && rt.on_plateau[j];
    if (flat)
      r.slope_inside = std::max(r.slope_inside, r.psi[j]);
    else
      r.slope_outside = std::max(r.slope_outside, r.psi[j]);
    if (r.psi[j] > r.tol) {
      ++r.slope_positive_points;
      if (!flat) {
        ++r.slope_points_outside;
        r.contained = false;
      }
    }
  }
  return r;
}

std::vector<ComparisonRow> eps_limit_compare(const std::vector<const RescaledTrajectory*>& rts, const FeSpace& fe,
                                             Alignment align, int n_samples) {
  if (rts.size() < 2) throw std::invalid_argument("comparison needs at least two trajectories");
  if (n_samples < 2) throw std::invalid_argument("comparison needs at least two samples");
  const RescaledTrajectory& ref = *rts.front();
  for (const auto* rt : rts) {
    if (rt->knots.empty() || rt->knots.front().alpha.size() != fe.n_nodes())
      throw std::invalid_argument("trajectories do not share the mesh");
    if (rt->T != ref.T || rt->load.G != ref.load.G || rt->load.ramp_table != ref.load.ramp_table)
      throw std::invalid_argument("trajectories do not share the load program");
  }
  double s_max = 0.0;
  for (const auto* rt : rts) s_max = std::max(s_max, rt->S);

  std::vector<ComparisonRow> rows;
  for (std::size_t m = 1; m < rts.size(); ++m) {
    const RescaledTrajectory& a = *rts[m - 1];
    const RescaledTrajectory& b = *rts[m];
    ComparisonRow row{a.eps, b.eps, 0.0, 0.0};
    for (int j = 0; j < n_samples; ++j) {
      const double u = static_cast<double>(j) / (n_samples - 1);
      const double sa = align == Alignment::affine ? u * a.S : u * s_max;
      const double sb = align == Alignment::affine ? u * b.S : u * s_max;
      const State xa = a.state_at(sa);
      const State xb = b.state_at(sb);
      const double d = fe.scalar_norm(xa.alpha - xb.alpha, NormKind::L2) +
                       fe.tensor_norm(xa.p - xb.p, NormKind::L2) + fe.strain_norm(xa.e - xb.e) +
                       std::abs(xa.t - xb.t);
      if (d > row.distance) {
        row.distance = d;
        row.at = u;
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace geodamage
