#include "geodamage/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace geodamage {

State sound_state(const FeSpace& fe) {
  State s;
  s.alpha = Vec::Ones(fe.n_nodes());
  s.u = Vec::Zero(fe.n_u_dofs());
  s.e = Vec::Zero(kVoigt * fe.n_elements());
  s.p = Vec::Zero(kVoigt * fe.n_nodes());
  return s;
}

Vec elastic_stress(const Vec& e, const HookeLaw& hooke) {
  Vec s(e.size());
  for (Eigen::Index t = 0; t < e.size() / kVoigt; ++t)
    set_tensor(s, static_cast<int>(t), hooke.apply(tensor_at(e, static_cast<int>(t))));
  return s;
}

double elastic_product(const Vec& a, const Vec& b, const HookeLaw& hooke, const FeSpace& fe) {
  double s = 0.0;
  for (int t = 0; t < fe.n_elements(); ++t)
    s += fe.element_area(t) * dot(hooke.apply(tensor_at(a, t)), tensor_at(b, t));
  return s;
}

double elastic_energy(const Vec& e, const HookeLaw& hooke, const FeSpace& fe) {
  return 0.5 * elastic_product(e, e, hooke, fe);
}

EnergyBreakdown total_energy(const State& s, const MaterialLaw& law, const FeSpace& fe) {
  if (s.alpha.size() != fe.n_nodes() || s.p.size() != kVoigt * fe.n_nodes() ||
      s.e.size() != kVoigt * fe.n_elements())
    throw std::invalid_argument("state does not match the finite element space");
  const QuadraticProfile d = law.damage.coefficients();
  const QuadraticProfile b = law.hardening.coefficients();
  const Vec a = fe.at_quad(s.alpha);
  const Vec psq = fe.tensor_sq_at_quad(s.p);
  EnergyBreakdown out;
  for (std::size_t k = 0; k < fe.quad4().size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const double w = fe.quad4()[k].weight;
    out.damage += w * d.value(a[i]);
    out.hardening += w * b.value(a[i]) * psq[i];
  }
  out.elastic = elastic_energy(s.e, law.hooke, fe);
  out.grad_alpha = law.grad_alpha_weight * fe.scalar_gradient_sq(s.alpha);
  out.grad_p = law.grad_p_weight * fe.tensor_gradient_sq(s.p);
  out.total = out.elastic + out.damage + out.grad_alpha + out.hardening + out.grad_p;
  return out;
}

ExtReal plastic_potential(const Vec& q, const ConstraintSet& k, const FeSpace& fe) {
  ExtReal sum(0.0);
  for (int i = 0; i < fe.n_nodes(); ++i) {
    const ExtReal h = k.support(tensor_at(q, i));
    if (h.is_infinite()) return ExtReal::infinity();
    sum += fe.lumped()[i] * h;
  }
  return sum;
}

ExtReal h_variation(const std::vector<Vec>& p_seq, int i1, int i2, const ConstraintSet& k,
                    const FeSpace& fe) {
  if (i1 < 0 || i2 >= static_cast<int>(p_seq.size()) || i1 > i2)
    throw std::invalid_argument("h_variation: indices outside the stored grid");
  ExtReal sum(0.0);
  for (int j = i1 + 1; j <= i2; ++j) sum += plastic_potential(p_seq[j] - p_seq[j - 1], k, fe);
  return sum;
}

Vec alpha_gradient(const State& s, const MaterialLaw& law, const FeSpace& fe) {
  const QuadraticProfile d = law.damage.coefficients();
  const QuadraticProfile b = law.hardening.coefficients();
  const Vec a = fe.at_quad(s.alpha);
  const Vec psq = fe.tensor_sq_at_quad(s.p);
  Vec g = 2.0 * law.grad_alpha_weight * (fe.stiffness() * s.alpha);
  for (std::size_t k = 0; k < fe.quad4().size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    const auto& q = fe.quad4()[k];
    const double density = q.weight * (d.slope(a[i]) + b.slope(a[i]) * psq[i]);
    for (int n = 0; n < 3; ++n) g[q.node[n]] += density * q.phi[n];
  }
  return g;
}

double partial_alpha(const State& s, const Vec& beta, const MaterialLaw& law, const FeSpace& fe) {
  return alpha_gradient(s, law, fe).dot(beta);
}

double psi_lumped(const Vec& g, const Vec& lumped) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < g.size(); ++i)
    if (g[i] > 0.0) s += g[i] * g[i] / lumped[i];
  return std::sqrt(s);
}

double psi_consistent(const Vec& g, const SpMat& mass) {
  // max_{b >= 0} g.b - b^T M b / 2 by cyclic coordinate descent; the answer
  // is |b*|_M.
  const Eigen::Index n = g.size();
  const Eigen::MatrixXd M(mass);
  Vec b = Vec::Zero(n);
  Vec Mb = Vec::Zero(n);
  for (int sweep = 0; sweep < 200000; ++sweep) {
    double change = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double r = g[i] - (Mb[i] - M(i, i) * b[i]);
      const double bi = std::max(0.0, r / M(i, i));
      const double delta = bi - b[i];
      if (delta != 0.0) {
        Mb += delta * M.col(i);
        b[i] = bi;
        change = std::max(change, std::abs(delta));
      }
    }
    if (change <= 1e-15 * (1.0 + b.lpNorm<Eigen::Infinity>())) break;
  }
  return std::sqrt(std::max(0.0, b.dot(Mb)));
}

double psi_slope(const State& s, const MaterialLaw& law, const FeSpace& fe) {
  return psi_lumped(alpha_gradient(s, law, fe), fe.lumped());
}

Vec generalized_stress(const State& s, const MaterialLaw& law, const FeSpace& fe) {
  Vec weighted = elastic_stress(s.e, law.hooke);
  for (int t = 0; t < fe.n_elements(); ++t) weighted.segment<3>(kVoigt * t) *= fe.element_area(t);
  Vec S = fe.average_transpose(weighted);
  const Vec bq = fe.at_quad(s.alpha);
  Vec coeff(bq.size());
  const QuadraticProfile b = law.hardening.coefficients();
  for (Eigen::Index i = 0; i < bq.size(); ++i) coeff[i] = b.value(bq[i]);
  const SpMat Mb = fe.weighted_mass(coeff);
  const int n = fe.n_nodes();
  Vec comp(n);
  for (int c = 0; c < kVoigt; ++c) {
    for (int i = 0; i < n; ++i) comp[i] = s.p[kVoigt * i + c];
    const Vec r = 2.0 * (Mb * comp) + 2.0 * law.grad_p_weight * (fe.stiffness() * comp);
    for (int i = 0; i < n; ++i) S[kVoigt * i + c] -= r[i];
  }
  return S;
}

double stress_worst_case(const Vec& S, const ConstraintSet& k, const FeSpace& fe) {
  double s = 0.0;
  for (int i = 0; i < fe.n_nodes(); ++i) {
    const double m = fe.lumped()[i];
    const double d = k.distance(tensor_at(S, i) / m);
    s += m * d * d;
  }
  return std::sqrt(s);
}

double stress_constraint_residual(const State& s, const MaterialLaw& law, const FeSpace& fe,
                                  int n_random, std::uint64_t seed) {
  const Vec S = generalized_stress(s, law, fe);
  const Vec& m = fe.lumped();
  const ConstraintSet& K = law.constraint;
  double worst = -std::numeric_limits<double>::infinity();
  auto consider = [&](const Vec& q) {
    const ExtReal h = plastic_potential(q, K, fe);
    if (h.is_finite()) worst = std::max(worst, S.dot(q) - h.value());
  };
  auto lumped_norm = [&](const Vec& q) {
    double acc = 0.0;
    for (int i = 0; i < fe.n_nodes(); ++i) acc += m[i] * q.segment<3>(kVoigt * i).squaredNorm();
    return std::sqrt(acc);
  };

  Vec q = Vec::Zero(S.size());
  for (int i = 0; i < fe.n_nodes(); ++i) {
    for (int c = 0; c < kVoigt; ++c) {
      for (double sign : {1.0, -1.0}) {
        q[kVoigt * i + c] = sign / std::sqrt(m[i]);
        consider(q);
        q[kVoigt * i + c] = 0.0;
      }
    }
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int r = 0; r < n_random; ++r) {
    for (Eigen::Index j = 0; j < q.size(); ++j) q[j] = normal(rng);
    q /= lumped_norm(q);
    consider(q);
    consider(-q);
  }
  // Exact maximizer: nodewise prox_H(sigma_i) directions weighted by distance.
  for (int i = 0; i < fe.n_nodes(); ++i) set_tensor(q, i, K.prox(tensor_at(S, i) / m[i], 1.0));
  const double qn = lumped_norm(q);
  if (qn > 0.0) consider(q / qn);
  return worst;
}

double equilibrium_residual(const State& s, const HookeLaw& hooke, const FeSpace& fe) {
  const Vec r = fe.divergence_load(elastic_stress(s.e, hooke));
  double acc = 0.0;
  for (int a = 0; a < fe.n_u_nodes(); ++a)
    if (!fe.u_fixed(a)) acc += r[2 * a] * r[2 * a] + r[2 * a + 1] * r[2 * a + 1];
  return std::sqrt(acc);
}

}  // namespace geodamage
