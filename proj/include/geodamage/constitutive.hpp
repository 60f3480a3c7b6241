#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "geodamage/sym_tensor.hpp"

namespace geodamage {

/// Nonnegative extended real: a finite value or a tagged +infinity.
class ExtReal {
 public:
  constexpr ExtReal() = default;
  constexpr ExtReal(double v) : value_(v) {}  // NOLINT(google-explicit-constructor)

  static constexpr ExtReal infinity() {
    ExtReal r;
    r.infinite_ = true;
    return r;
  }

  constexpr bool is_infinite() const { return infinite_; }
  constexpr bool is_finite() const { return !infinite_; }

  /// Finite value; +inf as an IEEE double when infinite.
  double value() const { return infinite_ ? std::numeric_limits<double>::infinity() : value_; }

  friend constexpr ExtReal operator+(ExtReal a, ExtReal b) {
    if (a.infinite_ || b.infinite_) return infinity();
    return ExtReal(a.value_ + b.value_);
  }
  ExtReal& operator+=(ExtReal o) { return *this = *this + o; }

  /// Scaling by s >= 0 with the convention 0 * inf = 0.
  friend constexpr ExtReal operator*(double s, ExtReal a) {
    if (a.infinite_) return s == 0.0 ? ExtReal(0.0) : infinity();
    return ExtReal(s * a.value_);
  }

  friend constexpr bool operator<=(ExtReal a, ExtReal b) {
    if (b.infinite_) return true;
    if (a.infinite_) return false;
    return a.value_ <= b.value_;
  }
  friend constexpr bool operator<(ExtReal a, ExtReal b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.value_ < b.value_;
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

/// Isotropic elasticity sigma = lambda tr(e) I + 2 mu e.
struct HookeLaw {
  double lambda_lame = 1.0;
  double mu = 1.0;

  void validate() const {
    if (!(lambda_lame >= 0.0)) throw std::invalid_argument("lambda_lame must be >= 0");
    if (!(mu > 0.0)) throw std::invalid_argument("mu must be > 0");
  }

  double gamma1() const { return 2.0 * mu; }
  double gamma2(int dim) const { return dim * lambda_lame + 2.0 * mu; }

  template <int D>
  SymTensor<D> apply(const SymTensor<D>& e) const {
    SymTensor<D> s = 2.0 * mu * e;
    const double vol = lambda_lame * e.trace();
    for (int i = 0; i < D; ++i) s.voigt[i] += vol;
    return s;
  }
};

/// c0 + c1 a + c2 a^2 with derivatives.
struct QuadraticProfile {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;

  double value(double a) const { return c0 + (c1 + c2 * a) * a; }
  double slope(double a) const { return c1 + 2.0 * c2 * a; }
  double curvature() const { return 2.0 * c2; }
};

enum class HardeningKind { linear, quadratic, softening };

/// Isotropic hardening B(alpha) = b(alpha) Id on symmetric tensors.
///   linear     b = b_floor + b_max (1 - alpha)
///   quadratic  b = b_floor + b_max (1 - alpha)^2
///   softening  b = b_floor + b_max alpha^2
struct HardeningProfile {
  HardeningKind kind = HardeningKind::softening;
  double b_max = 1.0;
  double b_floor = 0.0;

  void validate() const {
    if (!(b_max >= 0.0)) throw std::invalid_argument("hardening b_max must be >= 0");
    if (!(b_floor >= 0.0)) throw std::invalid_argument("hardening b_floor must be >= 0");
  }

  QuadraticProfile coefficients() const {
    switch (kind) {
      case HardeningKind::linear: return {b_floor + b_max, -b_max, 0.0};
      case HardeningKind::quadratic: return {b_floor + b_max, -2.0 * b_max, b_max};
      case HardeningKind::softening: return {b_floor, 0.0, b_max};
    }
    return {};
  }

  double modulus(double alpha) const { return coefficients().value(alpha); }
  double modulus_slope(double alpha) const { return coefficients().slope(alpha); }

  template <int D>
  SymTensor<D> apply(double alpha, const SymTensor<D>& p) const {
    if (!(alpha >= 0.0 && alpha <= 1.0))
      throw std::domain_error("hardening: alpha outside [0,1]: " + std::to_string(alpha));
    return modulus(alpha) * p;
  }
};

enum class DamageKind { linear, quadratic };

/// Damage dissipation density: linear w1 (1 - alpha), quadratic w1 (1 - alpha)^2.
struct DamageDissipation {
  DamageKind kind = DamageKind::linear;
  double w1 = 1.0;

  void validate() const {
    if (!(w1 >= 0.0)) throw std::invalid_argument("damage w1 must be >= 0");
  }

  QuadraticProfile coefficients() const {
    if (kind == DamageKind::linear) return {w1, -w1, 0.0};
    return {w1, -2.0 * w1, w1};
  }

  double value(double alpha) const { return coefficients().value(alpha); }
  double slope(double alpha) const { return coefficients().slope(alpha); }
  double curvature() const { return coefficients().curvature(); }
};

enum class ConstraintKind { ball, drucker_prager };

/// Closed convex set of admissible generalized stresses.
///   ball            |sigma| <= r_h
///   drucker_prager  tau sigma_m + |sigma_D| <= kappa
class ConstraintSet {
 public:
  static ConstraintSet ball(double r_h, int dim = 2) {
    if (!(r_h > 0.0)) throw std::invalid_argument("ball radius must be > 0");
    ConstraintSet k;
    k.kind_ = ConstraintKind::ball;
    k.r_h_ = r_h;
    k.dim_ = dim;
    return k;
  }

  static ConstraintSet drucker_prager(double tau, double kappa, int dim = 2) {
    if (!(tau > 0.0) || !(kappa > 0.0))
      throw std::invalid_argument("drucker_prager tau and kappa must be > 0");
    ConstraintSet k;
    k.kind_ = ConstraintKind::drucker_prager;
    k.tau_ = tau;
    k.kappa_ = kappa;
    k.dim_ = dim;
    return k;
  }

  ConstraintKind kind() const { return kind_; }
  int dim() const { return dim_; }
  double radius() const { return r_h_; }
  double tau() const { return tau_; }
  double kappa() const { return kappa_; }

  /// Radius of the largest centred ball inside the set.
  double r_eff() const {
    if (kind_ == ConstraintKind::ball) return r_h_;
    return kappa_ / std::sqrt(1.0 + tau_ * tau_ / dim_);
  }

  /// Cone {tr q >= tau |dev q|} membership, with a tiny slack for rounding in
  /// differences of nearly equal plastic strains.
  template <int D>
  bool in_cone(const SymTensor<D>& q) const {
    const double tr = q.trace();
    const double dn = tau_ * q.dev().norm();
    return dn - tr <= kRelSlack * (std::abs(tr) + dn) + kAbsSlack;
  }

  template <int D>
  ExtReal support(const SymTensor<D>& xi) const {
    check_dim<D>();
    if (kind_ == ConstraintKind::ball) return r_h_ * xi.norm();
    if (!in_cone(xi)) return ExtReal::infinity();
    return std::max(0.0, (kappa_ / tau_) * xi.trace());
  }

  /// argmin_q 0.5 |q - xi|^2 + lambda H(q).
  template <int D>
  SymTensor<D> prox(const SymTensor<D>& xi, double lambda) const {
    check_dim<D>();
    if (kind_ == ConstraintKind::ball) {
      const double n = xi.norm();
      const double thr = lambda * r_h_;
      if (n <= thr) return SymTensor<D>::zero();
      return (1.0 - thr / n) * xi;
    }
    SymTensor<D> shifted = xi;
    const double shift = lambda * kappa_ / tau_;
    for (int i = 0; i < D; ++i) shifted.voigt[i] -= shift;
    return project_cone(shifted);
  }

  /// Euclidean projection onto the set itself (Moreau: sigma - prox_H(sigma)).
  template <int D>
  SymTensor<D> project(const SymTensor<D>& sigma) const {
    return sigma - prox(sigma, 1.0);
  }

  template <int D>
  double distance(const SymTensor<D>& sigma) const {
    return prox(sigma, 1.0).norm();
  }

  /// Projection onto {tr q >= tau |dev q|}.
  template <int D>
  SymTensor<D> project_cone(const SymTensor<D>& q) const {
    const double sqn = std::sqrt(static_cast<double>(D));
    const double a = q.trace() / sqn;
    const SymTensor<D> d = q.dev();
    const double r = d.norm();
    const double k = sqn / tau_;
    if (r <= k * a) return q;
    if (a <= -k * r) return SymTensor<D>::zero();
    const double c = (a + k * r) / (1.0 + k * k);
    SymTensor<D> out = (c * k / r) * d;
    for (int i = 0; i < D; ++i) out.voigt[i] += c / sqn;
    return out;
  }

  void validate() const {
    if (kind_ == ConstraintKind::ball && !(r_h_ > 0.0))
      throw std::invalid_argument("ball radius must be > 0");
    if (kind_ == ConstraintKind::drucker_prager && (!(tau_ > 0.0) || !(kappa_ > 0.0)))
      throw std::invalid_argument("drucker_prager tau and kappa must be > 0");
  }

  static constexpr double kRelSlack = 1e-12;
  static constexpr double kAbsSlack = 1e-14;

 private:
  template <int D>
  void check_dim() const {
    if (D != dim_) throw std::invalid_argument("constraint set dimension mismatch");
  }

  ConstraintKind kind_ = ConstraintKind::ball;
  double r_h_ = 1.0;
  double tau_ = 1.0;
  double kappa_ = 1.0;
  int dim_ = 2;
};

struct MaterialLaw {
  HookeLaw hooke;
  HardeningProfile hardening;
  DamageDissipation damage;
  ConstraintSet constraint = ConstraintSet::ball(1.0);
  double grad_alpha_weight = 1.0;
  double grad_p_weight = 1.0;

  void validate() const {
    hooke.validate();
    hardening.validate();
    damage.validate();
    constraint.validate();
    if (!(grad_alpha_weight >= 0.0) || !(grad_p_weight >= 0.0))
      throw std::invalid_argument("gradient weights must be >= 0");
    if (hardening.coefficients().c2 < 0.0 || damage.coefficients().c2 < 0.0)
      throw std::invalid_argument("profiles must be convex in alpha");
  }
};

}  // namespace geodamage
