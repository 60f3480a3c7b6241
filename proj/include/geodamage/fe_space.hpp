#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <array>
#include <string>
#include <vector>

#include "geodamage/mesh.hpp"
#include "geodamage/sym_tensor.hpp"

namespace geodamage {

using Vec = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double>;
using Mat2 = Eigen::Matrix2d;

inline constexpr int kVoigt = SymTensor2::kSize;

inline SymTensor2 tensor_at(const Vec& field, int i) {
  return {{field[kVoigt * i], field[kVoigt * i + 1], field[kVoigt * i + 2]}};
}
inline void set_tensor(Vec& field, int i, const SymTensor2& t) {
  for (int c = 0; c < kVoigt; ++c) field[kVoigt * i + c] = t.voigt[c];
}

/// Quadrature point expressed through the P1 basis of up to three nodes.
struct QuadPoint {
  double weight;
  std::array<int, 3> node;
  std::array<double, 3> phi;
};

enum class NormKind { L1, L2, H1, L4 };
NormKind parse_norm_kind(const std::string& name);

/// Discrete spaces for damage (P1 scalar), displacement (P1 vector),
/// plastic strain (P1 tensor) and elastic strain (elementwise constant).
///
/// Field layouts: alpha[i]; u[2a + d]; p[3i + c]; e[3t + c], tensor
/// components in scaled Voigt order.
class FeSpace {
 public:
  static FeSpace structured(const Mesh& mesh);
  /// One material point of measure lx*ly with all gradients zero. The
  /// displacement lives on a fixed virtual triangle of the same area, so an
  /// affine boundary datum fixes Eu completely.
  static FeSpace homogeneous(double lx = 1.0, double ly = 1.0);

  bool is_homogeneous() const { return homogeneous_; }
  int n_nodes() const { return n_nodes_; }
  int n_elements() const { return static_cast<int>(elem_area_.size()); }
  int n_u_nodes() const { return u_mesh_.n_vertices(); }
  int n_u_dofs() const { return 2 * n_u_nodes(); }
  double measure() const { return measure_; }

  const Mesh& u_mesh() const { return u_mesh_; }
  bool u_fixed(int vertex) const { return u_mesh_.on_boundary[vertex] != 0; }

  const SpMat& mass() const { return mass_; }
  const SpMat& stiffness() const { return stiffness_; }
  const Vec& lumped() const { return lumped_; }
  const SpMat& u_mass() const { return u_mass_; }
  const SpMat& u_stiffness() const { return u_stiffness_; }

  const std::vector<QuadPoint>& quad4() const { return quad4_; }
  const std::vector<QuadPoint>& quad_edge() const { return quad_edge_; }

  double element_area(int t) const { return elem_area_[t]; }
  const std::array<int, 3>& element_nodes(int t) const { return elem_nodes_[t]; }
  const std::array<double, 3>& element_weights(int t) const { return elem_weights_[t]; }

  /// Maps the six local displacement dofs of element t to its strain.
  Eigen::Matrix<double, 3, 6> strain_matrix(int t) const;

  Vec strain_of(const Vec& u) const;
  /// Elementwise average of a nodal tensor field.
  Vec average(const Vec& p) const;
  /// Transpose of average: elementwise tensors to nodal loads.
  Vec average_transpose(const Vec& e) const;
  /// Weighted transpose of strain_of: sum_T |T| B_T^T s_T.
  Vec divergence_load(const Vec& s) const;

  /// Nodal interpolation of ramp * G x on the displacement mesh.
  Vec lift(const Mat2& G, double ramp) const;

  /// Sparse mass matrix weighted by a nodal coefficient field evaluated with
  /// the degree-4 rule: (i,j) -> int c(x) phi_i phi_j.
  SpMat weighted_mass(const Vec& coeff_at_quad) const;
  /// Values of a nodal scalar field at the degree-4 points.
  Vec at_quad(const Vec& scalar) const;
  /// Squared Frobenius norm of a nodal tensor field at the degree-4 points.
  Vec tensor_sq_at_quad(const Vec& p) const;

  double scalar_norm(const Vec& a, NormKind kind) const;
  double tensor_norm(const Vec& p, NormKind kind) const;
  double displacement_norm(const Vec& u, NormKind kind) const;
  double strain_norm(const Vec& e) const;
  /// sum_c p_c^T K p_c.
  double tensor_gradient_sq(const Vec& p) const;
  double scalar_gradient_sq(const Vec& a) const;

 private:
  bool homogeneous_ = false;
  int n_nodes_ = 0;
  double measure_ = 0.0;
  Mesh u_mesh_;
  std::vector<double> elem_area_;
  std::vector<std::array<int, 3>> elem_nodes_;
  std::vector<std::array<double, 3>> elem_weights_;
  SpMat mass_, stiffness_, u_mass_, u_stiffness_;
  Vec lumped_;
  std::vector<QuadPoint> quad4_, quad_edge_;
};

}  // namespace geodamage
