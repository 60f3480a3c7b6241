#pragma once

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "geodamage/constitutive.hpp"
#include "geodamage/energy.hpp"
#include "geodamage/fe_space.hpp"

namespace geodamage {

enum class LinearSolverKind { direct_sparse, conjugate_gradient };

struct SolverConfig {
  double tol_energy_stagnation = 1e-10;
  double tol_pd = 1e-9;
  /// Projected-gradient tolerance of the damage QP, in units of alpha.
  double tol_kkt = 1e-12;
  /// Max nodal change of alpha between the last two sweeps.
  double tol_sweep = 1e-9;
  int max_outer = 200;
  int max_inner = 5000;
  LinearSolverKind linear_solver = LinearSolverKind::direct_sparse;
  double cg_tol = 1e-13;
  int n_starts = 3;

  void validate() const;
};

/// Non-convergence of an inner solver; carries the last residual.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, double residual)
      : std::runtime_error(format(what, residual)), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  static std::string format(const std::string& what, double residual) {
    std::ostringstream os;
    os << what << " (residual " << std::setprecision(3) << residual << ")";
    return os.str();
  }
  double residual_;
};

/// Minimizes Q(Bu - avg p) over u with Dirichlet values on boundary vertices.
class ElasticSolver {
 public:
  ElasticSolver(const FeSpace& fe, const HookeLaw& hooke, LinearSolverKind kind = LinearSolverKind::direct_sparse,
                double cg_tol = 1e-13);

  Vec solve(const Vec& p, const Vec& lift) const;
  int n_free() const { return static_cast<int>(free_.size()); }

 private:
  const FeSpace* fe_;
  HookeLaw hooke_;
  LinearSolverKind kind_;
  std::vector<int> free_, fixed_;
  SpMat a_ff_, a_fb_;
  std::shared_ptr<Eigen::SimplicialLDLT<SpMat>> ldlt_;
  std::shared_ptr<Eigen::ConjugateGradient<SpMat, Eigen::Lower | Eigen::Upper>> cg_;
};

struct PlasticResult {
  Vec u, e, p;
  int iterations = 0;
  double residual = 0.0;
};

struct DamageResult {
  Vec alpha;
  int iterations = 0;
  double kkt = 0.0;
};

struct StepResult {
  State state;
  int sweeps = 0;
  int start_index = 0;
  std::vector<double> objective_trace;
  double plastic_residual = 0.0;
  double damage_kkt = 0.0;
  bool monotone = true;
  bool flagged = false;
  std::string diagnostic;
  double objective = 0.0;
};

class IncrementalSolver {
 public:
  IncrementalSolver(const FeSpace& fe, const MaterialLaw& law, SolverConfig cfg = {});

  const FeSpace& space() const { return *fe_; }
  const MaterialLaw& law() const { return law_; }
  const SolverConfig& config() const { return cfg_; }
  const ElasticSolver& elastic() const { return elastic_; }

  /// Elastic equilibrium for a given plastic strain and boundary lift.
  State elastic_state(const Vec& alpha, const Vec& p, const Vec& lift, double t) const;

  /// argmin over (u,e,p) in A(lift) of Q(e) + int b(alpha)|p|^2 + w_p|grad p|^2
  /// + Hcal(p - p_prev), by accelerated proximal gradient in the lumped metric.
  PlasticResult elastoplastic_step(const Vec& alpha, const Vec& p_prev, const Vec& p_start, const Vec& lift,
                                   double tol) const;
  PlasticResult elastoplastic_step(const Vec& alpha, const Vec& p_prev, const Vec& lift) const {
    return elastoplastic_step(alpha, p_prev, p_prev, lift, cfg_.tol_pd);
  }

  /// argmin over 0 <= alpha <= alpha_prev of D(alpha) + w_a|grad alpha|^2
  /// + int b(alpha)|p|^2 + eps/(2 tau)|alpha - alpha_prev|^2, by projected Newton.
  DamageResult damage_step(const Vec& p, const Vec& alpha_prev, const Vec& alpha_start, double eps,
                           double tau) const;
  DamageResult damage_step(const Vec& p, const Vec& alpha_prev, double eps, double tau) const {
    return damage_step(p, alpha_prev, alpha_prev, eps, tau);
  }

  /// E + Hcal(p - p_prev) + eps/(2 tau)|alpha - alpha_prev|^2.
  double incremental_objective(const State& s, const State& prev, double eps, double tau) const;

  /// Alternating minimization from several starts; keeps the lowest objective.
  StepResult incremental_minimize(const State& prev, double t, const Vec& lift, double eps, double tau) const;

  /// Alternating minimization from one explicit starting point.
  StepResult minimize_from(const State& prev, const Vec& alpha0, const Vec& p0, bool damage_first, double t,
                           const Vec& lift, double eps, double tau) const;

 private:
  SpMat hardening_mass(const Vec& alpha) const;
  double lipschitz(const SpMat& hardening) const;

  const FeSpace* fe_;
  MaterialLaw law_;
  SolverConfig cfg_;
  ElasticSolver elastic_;
};

struct OracleResult {
  double alpha = 1.0;
  SymTensor2 p;
  double objective = 0.0;
  int levels = 0;
};

/// Exhaustive grid minimization of the incremental objective at one material
/// point: alpha on a uniform grid refined around the best cell, p by
/// coarse-to-fine grid zooming. e is fixed by the kinematic constraint.
OracleResult brute_force_oracle_homogeneous(double alpha_prev, const SymTensor2& p_prev, const SymTensor2& total_strain,
                                            double eps, double tau, const MaterialLaw& law, double measure);

/// Incremental objective of the one-point model.
double homogeneous_objective(double alpha, const SymTensor2& p, double alpha_prev, const SymTensor2& p_prev,
                             const SymTensor2& total_strain, double eps, double tau, const MaterialLaw& law,
                             double measure);

}  // namespace geodamage
