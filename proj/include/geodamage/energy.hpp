#pragma once

#include <cstdint>
#include <vector>

#include "geodamage/constitutive.hpp"
#include "geodamage/fe_space.hpp"

namespace geodamage {

/// One time slice of the discrete fields.
struct State {
  double t = 0.0;
  Vec alpha;
  Vec u;
  Vec e;
  Vec p;
};

/// Sound, unstrained state: alpha = 1, everything else zero.
State sound_state(const FeSpace& fe);

struct EnergyBreakdown {
  double elastic = 0.0;
  double damage = 0.0;
  double grad_alpha = 0.0;
  double hardening = 0.0;
  double grad_p = 0.0;
  double total = 0.0;
};

/// Elementwise C e.
Vec elastic_stress(const Vec& e, const HookeLaw& hooke);
double elastic_energy(const Vec& e, const HookeLaw& hooke, const FeSpace& fe);
/// sum_T |T| C a_T : b_T.
double elastic_product(const Vec& a, const Vec& b, const HookeLaw& hooke, const FeSpace& fe);

/// int d(alpha) + w_a |grad alpha|^2 + int b(alpha)|p|^2 + w_p |grad p|^2 + Q(e).
EnergyBreakdown total_energy(const State& s, const MaterialLaw& law, const FeSpace& fe);

/// Lumped-quadrature plastic potential; +inf when any node is outside the
/// domain of H.
ExtReal plastic_potential(const Vec& q, const ConstraintSet& k, const FeSpace& fe);

/// Sum of plastic potentials of consecutive increments of p_seq on [i1, i2].
ExtReal h_variation(const std::vector<Vec>& p_seq, int i1, int i2, const ConstraintSet& k,
                    const FeSpace& fe);

/// Nodal vector g with dE/dalpha[beta] = g . beta.
Vec alpha_gradient(const State& s, const MaterialLaw& law, const FeSpace& fe);
double partial_alpha(const State& s, const Vec& beta, const MaterialLaw& law, const FeSpace& fe);

/// sup { -g . beta : beta <= 0, |beta|_lumped = 1 } in closed form.
double psi_lumped(const Vec& g, const Vec& lumped);
/// Same supremum in the consistent-mass norm, via a nonnegative QP.
double psi_consistent(const Vec& g, const SpMat& mass);
double psi_slope(const State& s, const MaterialLaw& law, const FeSpace& fe);

/// Nodal dual vector S with S . q = (C e, avg q) - 2 (B p, q) - 2 w_p (grad p, grad q).
Vec generalized_stress(const State& s, const MaterialLaw& law, const FeSpace& fe);

/// max over normalized tests q of S . q - Hcal(q). Tests: every nodal basis
/// direction, n_random random fields with both signs, and the exact maximizer
/// in the lumped norm.
double stress_constraint_residual(const State& s, const MaterialLaw& law, const FeSpace& fe,
                                  int n_random = 20, std::uint64_t seed = 7);

/// Exact supremum of S . q - Hcal(q) over |q|_lumped = 1.
double stress_worst_case(const Vec& S, const ConstraintSet& k, const FeSpace& fe);

/// Norm of the free-dof block of sum_T |T| B_T^T C e_T.
double equilibrium_residual(const State& s, const HookeLaw& hooke, const FeSpace& fe);

}  // namespace geodamage
