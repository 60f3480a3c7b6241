#include "geodamage/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace geodamage {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec component(const Vec& f, int c, int n) {
  Vec out(n);
  for (int i = 0; i < n; ++i) out[i] = f[kVoigt * i + c];
  return out;
}

/// Applies a scalar nodal operator to each tensor component.
Vec apply_componentwise(const SpMat& A, const Vec& f) {
  const int n = static_cast<int>(A.rows());
  Vec out(f.size());
  for (int c = 0; c < kVoigt; ++c) {
    const Vec r = A * component(f, c, n);
    for (int i = 0; i < n; ++i) out[kVoigt * i + c] = r[i];
  }
  return out;
}

double lumped_sq(const Vec& f, const Vec& m) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < m.size(); ++i) s += m[i] * f.segment<3>(kVoigt * i).squaredNorm();
  return s;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(tol_energy_stagnation > 0) || !(tol_pd > 0) || !(tol_kkt > 0) || !(tol_sweep > 0) || !(cg_tol > 0))
    throw std::invalid_argument("solver tolerances must be > 0");
  if (max_outer < 1 || max_inner < 1) throw std::invalid_argument("solver iteration limits must be >= 1");
  if (n_starts < 1 || n_starts > 3) throw std::invalid_argument("solver.n_starts must be in 1..3");
}

// ---------------------------------------------------------------------------

ElasticSolver::ElasticSolver(const FeSpace& fe, const HookeLaw& hooke, LinearSolverKind kind, double cg_tol)
    : fe_(&fe), hooke_(hooke), kind_(kind) {
  const int ndof = fe.n_u_dofs();
  std::vector<int> local(ndof, -1);
  for (int a = 0; a < fe.n_u_nodes(); ++a) {
    for (int d = 0; d < 2; ++d) {
      const int dof = 2 * a + d;
      if (fe.u_fixed(a)) {
        local[dof] = static_cast<int>(fixed_.size());
        fixed_.push_back(dof);
      } else {
        local[dof] = static_cast<int>(free_.size());
        free_.push_back(dof);
      }
    }
  }
  Eigen::Matrix3d C;
  for (int c = 0; c < kVoigt; ++c) {
    SymTensor2 unit;
    unit.voigt[c] = 1.0;
    const SymTensor2 col = hooke.apply(unit);
    for (int r = 0; r < kVoigt; ++r) C(r, c) = col.voigt[r];
  }
  std::vector<Eigen::Triplet<double>> tff, tfb;
  for (int t = 0; t < fe.n_elements(); ++t) {
    const auto B = fe.strain_matrix(t);
    const Eigen::Matrix<double, 6, 6> ke = fe.element_area(t) * B.transpose() * C * B;
    int dofs[6];
    for (int a = 0; a < 3; ++a) {
      dofs[2 * a] = 2 * fe.u_mesh().triangles[t][a];
      dofs[2 * a + 1] = dofs[2 * a] + 1;
    }
    for (int r = 0; r < 6; ++r) {
      if (fe.u_fixed(dofs[r] / 2)) continue;
      for (int c = 0; c < 6; ++c) {
        if (fe.u_fixed(dofs[c] / 2))
          tfb.emplace_back(local[dofs[r]], local[dofs[c]], ke(r, c));
        else
          tff.emplace_back(local[dofs[r]], local[dofs[c]], ke(r, c));
      }
    }
  }
  a_ff_.resize(static_cast<Eigen::Index>(free_.size()), static_cast<Eigen::Index>(free_.size()));
  a_ff_.setFromTriplets(tff.begin(), tff.end());
  a_fb_.resize(static_cast<Eigen::Index>(free_.size()), static_cast<Eigen::Index>(fixed_.size()));
  a_fb_.setFromTriplets(tfb.begin(), tfb.end());
  if (free_.empty()) return;
  if (kind_ == LinearSolverKind::direct_sparse) {
    ldlt_ = std::make_shared<Eigen::SimplicialLDLT<SpMat>>(a_ff_);
    if (ldlt_->info() != Eigen::Success) throw SolverFailure("elastic matrix factorization failed", 0.0);
  } else {
    cg_ = std::make_shared<Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper>>();
    cg_->setTolerance(cg_tol);
    cg_->setMaxIterations(10 * static_cast<int>(free_.size()) + 100);
    cg_->compute(a_ff_);
  }
}

Vec ElasticSolver::solve(const Vec& p, const Vec& lift) const {
  Vec u = lift;
  if (free_.empty()) return u;
  const Vec load = fe_->divergence_load(elastic_stress(fe_->average(p), hooke_));
  Vec ub(static_cast<Eigen::Index>(fixed_.size()));
  for (std::size_t k = 0; k < fixed_.size(); ++k) ub[static_cast<Eigen::Index>(k)] = lift[fixed_[k]];
  Vec rhs(static_cast<Eigen::Index>(free_.size()));
  for (std::size_t k = 0; k < free_.size(); ++k) rhs[static_cast<Eigen::Index>(k)] = load[free_[k]];
  rhs -= a_fb_ * ub;
  Vec uf;
  if (ldlt_) {
    uf = ldlt_->solve(rhs);
  } else {
    uf = cg_->solve(rhs);
    if (cg_->info() != Eigen::Success) throw SolverFailure("elastic CG did not converge", cg_->error());
  }
  for (std::size_t k = 0; k < free_.size(); ++k) u[free_[k]] = uf[static_cast<Eigen::Index>(k)];
  return u;
}

// ---------------------------------------------------------------------------

IncrementalSolver::IncrementalSolver(const FeSpace& fe, const MaterialLaw& law, SolverConfig cfg)
    : fe_(&fe), law_(law), cfg_(cfg), elastic_(fe, law.hooke, cfg.linear_solver, cfg.cg_tol) {
  law_.validate();
  cfg_.validate();
}

State IncrementalSolver::elastic_state(const Vec& alpha, const Vec& p, const Vec& lift, double t) const {
  State s;
  s.t = t;
  s.alpha = alpha;
  s.p = p;
  s.u = elastic_.solve(p, lift);
  s.e = fe_->strain_of(s.u) - fe_->average(p);
  return s;
}

SpMat IncrementalSolver::hardening_mass(const Vec& alpha) const {
  const QuadraticProfile b = law_.hardening.coefficients();
  Vec coeff = fe_->at_quad(alpha);
  for (Eigen::Index i = 0; i < coeff.size(); ++i) coeff[i] = b.value(coeff[i]);
  return fe_->weighted_mass(coeff);
}

double IncrementalSolver::lipschitz(const SpMat& hardening) const {
  const Vec& m = fe_->lumped();
  const int n = fe_->n_nodes();
  const SpMat smooth = 2.0 * hardening + 2.0 * law_.grad_p_weight * fe_->stiffness();
  std::vector<double> area(fe_->n_elements());
  for (int t = 0; t < fe_->n_elements(); ++t) area[t] = fe_->element_area(t);
  auto apply = [&](const Vec& v) {
    Vec s = elastic_stress(fe_->average(v), law_.hooke);
    for (int t = 0; t < fe_->n_elements(); ++t) s.segment<3>(kVoigt * t) *= area[t];
    return Vec(fe_->average_transpose(s) + apply_componentwise(smooth, v));
  };
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> uni(0.5, 1.5);
  Vec v(kVoigt * n);
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = uni(rng);
  double lambda = 0.0;
  for (int it = 0; it < 80; ++it) {
    v /= std::sqrt(lumped_sq(v, m));
    const Vec hv = apply(v);
    lambda = v.dot(hv);
    Vec w(hv.size());
    for (int i = 0; i < n; ++i) w.segment<3>(kVoigt * i) = hv.segment<3>(kVoigt * i) / m[i];
    v = w;
  }
  return 1.05 * lambda + 1e-12;
}

PlasticResult IncrementalSolver::elastoplastic_step(const Vec& alpha, const Vec& p_prev, const Vec& p_start,
                                                    const Vec& lift, double tol) const {
  const FeSpace& fe = *fe_;
  const Vec& m = fe.lumped();
  const int n = fe.n_nodes();
  const ConstraintSet& K = law_.constraint;
  const SpMat Mb = hardening_mass(alpha);
  const SpMat smooth_op = Mb + law_.grad_p_weight * fe.stiffness();
  double step = 0.9 / lipschitz(Mb);

  auto elastic_part = [&](const Vec& p, Vec& u, Vec& e) {
    u = elastic_.solve(p, lift);
    e = fe.strain_of(u) - fe.average(p);
  };
  auto smooth_value = [&](const Vec& p, const Vec& e) {
    return elastic_energy(e, law_.hooke, fe) + p.dot(apply_componentwise(smooth_op, p));
  };
  auto gradient = [&](const Vec& p, const Vec& e) {
    Vec s = elastic_stress(e, law_.hooke);
    for (int t = 0; t < fe.n_elements(); ++t) s.segment<3>(kVoigt * t) *= fe.element_area(t);
    return Vec(2.0 * apply_componentwise(smooth_op, p) - fe.average_transpose(s));
  };

  Vec x = p_start, ux, ex;
  elastic_part(x, ux, ex);
  Vec y = x, uy = ux, ey = ex;
  double t_mom = 1.0;
  PlasticResult out;
  double res = kInf;
  Vec xn(x.size()), un, en;
  for (int it = 1; it <= cfg_.max_inner; ++it) {
    const Vec gy = gradient(y, ey);
    const double fy = smooth_value(y, ey);
    double fn = 0.0;
    Vec d;
    for (int bt = 0; bt < 60; ++bt) {
      for (int i = 0; i < n; ++i) {
        SymTensor2 z = tensor_at(y, i) - tensor_at(p_prev, i);
        z -= (step / m[i]) * tensor_at(gy, i);
        set_tensor(xn, i, tensor_at(p_prev, i) + K.prox(z, step));
      }
      elastic_part(xn, un, en);
      fn = smooth_value(xn, en);
      d = xn - y;
      const double model = fy + gy.dot(d) + lumped_sq(d, m) / (2.0 * step);
      if (fn <= model + 1e-13 * std::max(1.0, std::abs(fy))) break;
      step *= 0.5;
    }
    res = std::sqrt(lumped_sq(d, m)) / step;
    out.iterations = it;
    if (res <= tol) {
      x = xn;
      ux = un;
      ex = en;
      break;
    }
    double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_mom * t_mom));
    double beta = (t_mom - 1.0) / t_next;
    // Gradient-based restart when the momentum opposes the prox step.
    double restart = 0.0;
    for (int i = 0; i < n; ++i)
      restart += m[i] * (y.segment<3>(kVoigt * i) - xn.segment<3>(kVoigt * i))
                            .dot(xn.segment<3>(kVoigt * i) - x.segment<3>(kVoigt * i));
    if (restart > 0.0) {
      beta = 0.0;
      t_next = 1.0;
    }
    y = xn + beta * (xn - x);
    uy = un + beta * (un - ux);
    ey = en + beta * (en - ex);
    x = xn;
    ux = un;
    ex = en;
    t_mom = t_next;
  }
  out.residual = res;
  if (!(res <= tol)) throw SolverFailure("elastoplastic step did not converge", res);
  out.p = x;
  out.u = ux;
  out.e = ex;
  return out;
}

DamageResult IncrementalSolver::damage_step(const Vec& p, const Vec& alpha_prev, const Vec& alpha_start, double eps,
                                            double tau) const {
  const FeSpace& fe = *fe_;
  const int n = fe.n_nodes();
  const Vec& m = fe.lumped();
  const QuadraticProfile d = law_.damage.coefficients();
  const QuadraticProfile b = law_.hardening.coefficients();
  const Vec psq = fe.tensor_sq_at_quad(p);
  const double visc = tau > 0.0 ? eps / tau : 0.0;

  SpMat H = (2.0 * d.c2 + visc) * fe.mass() + (2.0 * b.c2) * fe.weighted_mass(psq) +
            (2.0 * law_.grad_alpha_weight) * fe.stiffness();
  Vec lin = -visc * (fe.mass() * alpha_prev);
  for (std::size_t k = 0; k < fe.quad4().size(); ++k) {
    const auto& q = fe.quad4()[k];
    const double dens = q.weight * (d.c1 + b.c1 * psq[static_cast<Eigen::Index>(k)]);
    for (int a = 0; a < 3; ++a) lin[q.node[a]] += dens * q.phi[a];
  }
  double diag_max = 0.0;
  for (int i = 0; i < n; ++i) diag_max = std::max(diag_max, H.coeff(i, i));
  const double reg = 1e-13 * std::max(diag_max, 1e-300);

  auto clamp = [&](Vec a) {
    for (int i = 0; i < n; ++i) a[i] = std::clamp(a[i], 0.0, alpha_prev[i]);
    return a;
  };

  DamageResult out;
  Vec x = clamp(alpha_start);
  double kkt = kInf;
  for (int it = 0; it < cfg_.max_inner; ++it) {
    const Vec g = H * x + lin;
    kkt = 0.0;
    for (int i = 0; i < n; ++i)
      kkt = std::max(kkt, std::abs(x[i] - std::clamp(x[i] - g[i] / m[i], 0.0, alpha_prev[i])));
    out.iterations = it;
    if (kkt <= cfg_.tol_kkt) break;

    const double margin = std::min(1e-6, kkt);
    std::vector<int> free_idx, local(n, -1);
    for (int i = 0; i < n; ++i) {
      const bool at_low = x[i] <= margin && g[i] > 0.0;
      const bool at_high = x[i] >= alpha_prev[i] - margin && g[i] < 0.0;
      if (!(at_low || at_high) && alpha_prev[i] > 0.0) {
        local[i] = static_cast<int>(free_idx.size());
        free_idx.push_back(i);
      }
    }
    Vec dir = Vec::Zero(n);
    for (int i = 0; i < n; ++i)
      if (local[i] < 0) dir[i] = -g[i] / m[i];
    if (!free_idx.empty()) {
      std::vector<Eigen::Triplet<double>> trip;
      for (int k = 0; k < H.outerSize(); ++k)
        for (SpMat::InnerIterator itH(H, k); itH; ++itH)
          if (local[itH.row()] >= 0 && local[itH.col()] >= 0)
            trip.emplace_back(local[itH.row()], local[itH.col()], itH.value());
      const auto nf = static_cast<Eigen::Index>(free_idx.size());
      for (Eigen::Index k = 0; k < nf; ++k) trip.emplace_back(k, k, reg);
      SpMat Hf(nf, nf);
      Hf.setFromTriplets(trip.begin(), trip.end());
      Vec gf(nf);
      for (Eigen::Index k = 0; k < nf; ++k) gf[k] = g[free_idx[k]];
      Eigen::SimplicialLDLT<SpMat> ldlt(Hf);
      const Vec df = ldlt.solve(-gf);
      for (Eigen::Index k = 0; k < nf; ++k) dir[free_idx[k]] = df[k];
    }
    double s = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Vec xs = clamp(x + s * dir);
      const Vec step_vec = xs - x;
      const double linear = g.dot(step_vec);
      // Exact change of the quadratic, free of cancellation.
      const double change = linear + 0.5 * step_vec.dot(H * step_vec);
      if (change <= 1e-4 * linear) {
        accepted = true;
        x = xs;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) break;
  }
  out.kkt = kkt;
  out.alpha = clamp(x);
  if (!(kkt <= cfg_.tol_kkt)) {
    // Recompute after final clamp; report failure if still above tolerance.
    const Vec g = H * out.alpha + lin;
    double r = 0.0;
    for (int i = 0; i < n; ++i)
      r = std::max(r, std::abs(out.alpha[i] - std::clamp(out.alpha[i] - g[i] / m[i], 0.0, alpha_prev[i])));
    out.kkt = r;
    if (r > cfg_.tol_kkt) throw SolverFailure("damage step did not converge", r);
  }
  return out;
}

double IncrementalSolver::incremental_objective(const State& s, const State& prev, double eps, double tau) const {
  const EnergyBreakdown E = total_energy(s, law_, *fe_);
  const ExtReal h = plastic_potential(s.p - prev.p, law_.constraint, *fe_);
  if (h.is_infinite()) return kInf;
  double visc = 0.0;
  if (eps > 0.0 && tau > 0.0) {
    const Vec da = s.alpha - prev.alpha;
    visc = eps / (2.0 * tau) * da.dot(fe_->mass() * da);
  }
  return E.total + h.value() + visc;
}

StepResult IncrementalSolver::minimize_from(const State& prev, const Vec& alpha0, const Vec& p0, bool damage_first,
                                            double t, const Vec& lift, double eps, double tau) const {
  StepResult r;
  Vec alpha = alpha0;
  Vec p = p0;
  if (damage_first) alpha = damage_step(p, prev.alpha, prev.alpha, eps, tau).alpha;
  double last_obj = kInf;
  double inner_tol = 1e-6;
  for (int sweep = 1; sweep <= cfg_.max_outer; ++sweep) {
    const PlasticResult ep = elastoplastic_step(alpha, prev.p, p, lift, std::max(inner_tol, cfg_.tol_pd * 1e-2));
    const DamageResult dm = damage_step(ep.p, prev.alpha, alpha, eps, tau);
    const double change_a = (dm.alpha - alpha).lpNorm<Eigen::Infinity>();
    const double change_p = (ep.p - p).lpNorm<Eigen::Infinity>();
    r.state.t = t;
    r.state.alpha = dm.alpha;
    r.state.u = ep.u;
    r.state.e = ep.e;
    r.state.p = ep.p;
    r.plastic_residual = ep.residual;
    r.damage_kkt = dm.kkt;
    r.sweeps = sweep;
    const double obj = incremental_objective(r.state, prev, eps, tau);
    r.objective_trace.push_back(obj);
    if (obj > last_obj + 1e-12 * std::max(1.0, std::abs(obj)) && inner_tol <= cfg_.tol_pd) r.monotone = false;
    alpha = dm.alpha;
    p = ep.p;
    const bool fixed_point = change_a == 0.0 && change_p == 0.0;
    const bool stagnated =
        fixed_point || std::abs(last_obj - obj) <= cfg_.tol_energy_stagnation * std::max(1.0, std::abs(obj));
    last_obj = obj;
    inner_tol = std::min(inner_tol, 0.1 * (change_a + change_p));
    if (stagnated && change_a <= cfg_.tol_sweep && ep.residual <= cfg_.tol_pd && dm.kkt <= cfg_.tol_kkt) {
      r.objective = obj;
      return r;
    }
  }
  r.objective = last_obj;
  r.flagged = true;
  r.diagnostic = "alternating minimization reached max_outer without meeting the stopping tests";
  return r;
}

StepResult IncrementalSolver::incremental_minimize(const State& prev, double t, const Vec& lift, double eps,
                                                   double tau) const {
  StepResult best;
  bool have = false;
  for (int start = 0; start < cfg_.n_starts; ++start) {
    StepResult r;
    if (start == 0) {
      r = minimize_from(prev, prev.alpha, prev.p, false, t, lift, eps, tau);
    } else if (start == 1) {
      r = minimize_from(prev, prev.alpha, prev.p, true, t, lift, eps, tau);
    } else {
      r = minimize_from(prev, Vec::Zero(prev.alpha.size()), prev.p, false, t, lift, eps, tau);
    }
    r.start_index = start;
    if (!have || (r.objective < best.objective - 1e-12 * std::max(1.0, std::abs(best.objective)) &&
                  !r.flagged) ||
        (best.flagged && !r.flagged)) {
      best = std::move(r);
      have = true;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------

double homogeneous_objective(double alpha, const SymTensor2& p, double alpha_prev, const SymTensor2& p_prev,
                             const SymTensor2& total_strain, double eps, double tau, const MaterialLaw& law,
                             double measure) {
  const ExtReal h = law.constraint.support(p - p_prev);
  if (h.is_infinite()) return kInf;
  const SymTensor2 e = total_strain - p;
  const double visc = (eps > 0.0 && tau > 0.0) ? eps / (2.0 * tau) * (alpha - alpha_prev) * (alpha - alpha_prev) : 0.0;
  return measure * (0.5 * dot(law.hooke.apply(e), e) + law.damage.value(alpha) +
                    law.hardening.modulus(alpha) * dot(p, p) + h.value() + visc);
}

namespace {

struct PSearch {
  SymTensor2 p;
  double value;
};

PSearch zoom_p(double alpha, double alpha_prev, const SymTensor2& p_prev, const SymTensor2& E, double eps, double tau,
               const MaterialLaw& law, double measure, int* levels) {
  constexpr int half = 10;
  SymTensor2 centre = p_prev;
  double width = 2.0 * (E.norm() + p_prev.norm()) + 0.1;
  PSearch best{p_prev, homogeneous_objective(alpha, p_prev, alpha_prev, p_prev, E, eps, tau, law, measure)};
  int lv = 0;
  while (width > 1e-8) {
    const double h = width / half;
    SymTensor2 level_best = best.p;
    for (int i = -half; i <= half; ++i)
      for (int j = -half; j <= half; ++j)
        for (int k = -half; k <= half; ++k) {
          SymTensor2 q = centre;
          q.voigt[0] += i * h;
          q.voigt[1] += j * h;
          q.voigt[2] += k * h;
          const double v = homogeneous_objective(alpha, q, alpha_prev, p_prev, E, eps, tau, law, measure);
          if (v < best.value) {
            best = {q, v};
            level_best = q;
          }
        }
    centre = level_best;
    width = 3.0 * h;
    ++lv;
  }
  if (levels) *levels = lv;
  return best;
}

}  // namespace

OracleResult brute_force_oracle_homogeneous(double alpha_prev, const SymTensor2& p_prev, const SymTensor2& total_strain,
                                            double eps, double tau, const MaterialLaw& law, double measure) {
  OracleResult out;
  auto eval = [&](double a) { return zoom_p(a, alpha_prev, p_prev, total_strain, eps, tau, law, measure, &out.levels); };
  constexpr int coarse = 200;
  double lo = 0.0, hi = alpha_prev;
  double best_a = alpha_prev;
  PSearch best = eval(alpha_prev);
  int n = coarse;
  while (hi - lo > 1e-10) {
    const double h = (hi - lo) / (n - 1);
    for (int i = 0; i < n; ++i) {
      const double a = std::min(alpha_prev, lo + i * h);
      const PSearch s = eval(a);
      if (s.value < best.value) {
        best = s;
        best_a = a;
      }
    }
    lo = std::max(0.0, best_a - h);
    hi = std::min(alpha_prev, best_a + h);
    n = 11;
  }
  out.alpha = best_a;
  out.p = best.p;
  out.objective = best.value;
  return out;
}

}  // namespace geodamage
