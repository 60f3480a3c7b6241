#include "geodamage/fe_space.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace geodamage {
namespace {

struct Bary {
  double w;
  std::array<double, 3> l;
};

// Symmetric degree-4 rule with six points; weights relative to the area.
const std::array<Bary, 6>& dunavant4() {
  static const std::array<Bary, 6> rule = [] {
    const double a1 = 0.445948490915965, w1 = 0.223381589678011;
    const double a2 = 0.091576213509771, w2 = 0.109951743655322;
    return std::array<Bary, 6>{{{w1, {a1, a1, 1 - 2 * a1}},
                                {w1, {a1, 1 - 2 * a1, a1}},
                                {w1, {1 - 2 * a1, a1, a1}},
                                {w2, {a2, a2, 1 - 2 * a2}},
                                {w2, {a2, 1 - 2 * a2, a2}},
                                {w2, {1 - 2 * a2, a2, a2}}}};
  }();
  return rule;
}

const std::array<Bary, 3>& edge_midpoints() {
  static const std::array<Bary, 3> rule{{{1.0 / 3, {0.5, 0.5, 0.0}},
                                         {1.0 / 3, {0.0, 0.5, 0.5}},
                                         {1.0 / 3, {0.5, 0.0, 0.5}}}};
  return rule;
}

template <std::size_t N>
std::vector<QuadPoint> tabulate(const Mesh& m, const std::array<Bary, N>& rule) {
  std::vector<QuadPoint> out;
  out.reserve(m.n_triangles() * N);
  for (int t = 0; t < m.n_triangles(); ++t)
    for (const auto& b : rule) out.push_back({b.w * m.areas[t], m.triangles[t], b.l});
  return out;
}

SpMat mass_from(const std::vector<QuadPoint>& quad, int n) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(quad.size() * 9);
  for (const auto& q : quad)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        trip.emplace_back(q.node[a], q.node[b], q.weight * q.phi[a] * q.phi[b]);
  SpMat M(n, n);
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

SpMat stiffness_from(const Mesh& m) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(m.n_triangles() * 9);
  for (int t = 0; t < m.n_triangles(); ++t) {
    const auto& g = m.gradients[t];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        trip.emplace_back(m.triangles[t][a], m.triangles[t][b],
                          m.areas[t] * (g[a][0] * g[b][0] + g[a][1] * g[b][1]));
  }
  SpMat K(m.n_vertices(), m.n_vertices());
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

Vec row_sums(const SpMat& M) {
  Vec s = Vec::Zero(M.rows());
  for (int k = 0; k < M.outerSize(); ++k)
    for (SpMat::InnerIterator it(M, k); it; ++it) s[it.row()] += it.value();
  return s;
}

double quad_form_components(const SpMat& A, const Vec& f, int comps) {
  const int n = static_cast<int>(A.rows());
  double s = 0.0;
  Vec c(n);
  for (int k = 0; k < comps; ++k) {
    for (int i = 0; i < n; ++i) c[i] = f[comps * i + k];
    s += c.dot(A * c);
  }
  return s;
}

}  // namespace

NormKind parse_norm_kind(const std::string& name) {
  if (name == "L1") return NormKind::L1;
  if (name == "L2") return NormKind::L2;
  if (name == "H1") return NormKind::H1;
  if (name == "L4") return NormKind::L4;
  throw std::invalid_argument("unknown norm kind: " + name);
}

FeSpace FeSpace::structured(const Mesh& mesh) {
  FeSpace s;
  s.u_mesh_ = mesh;
  s.n_nodes_ = mesh.n_vertices();
  s.measure_ = mesh.total_area();
  s.elem_area_ = mesh.areas;
  s.elem_nodes_ = mesh.triangles;
  s.elem_weights_.assign(mesh.n_triangles(), {1.0 / 3, 1.0 / 3, 1.0 / 3});
  s.quad4_ = tabulate(mesh, dunavant4());
  s.quad_edge_ = tabulate(mesh, edge_midpoints());
  s.mass_ = mass_from(s.quad4_, s.n_nodes_);
  s.stiffness_ = stiffness_from(mesh);
  s.lumped_ = row_sums(s.mass_);
  s.u_mass_ = s.mass_;
  s.u_stiffness_ = s.stiffness_;
  return s;
}

FeSpace FeSpace::homogeneous(double lx, double ly) {
  if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("homogeneous space needs lx, ly > 0");
  FeSpace s;
  s.homogeneous_ = true;
  s.u_mesh_ = make_mesh({{0.0, 0.0}, {2.0 * lx, 0.0}, {0.0, ly}}, {{0, 1, 2}});
  s.n_nodes_ = 1;
  s.measure_ = lx * ly;
  s.elem_area_ = {s.measure_};
  s.elem_nodes_ = {{0, 0, 0}};
  s.elem_weights_ = {{1.0, 0.0, 0.0}};
  const QuadPoint point{s.measure_, {0, 0, 0}, {1.0, 0.0, 0.0}};
  s.quad4_ = {point};
  s.quad_edge_ = {point};
  s.mass_ = mass_from(s.quad4_, 1);
  s.stiffness_ = SpMat(1, 1);
  s.lumped_ = Vec::Constant(1, s.measure_);
  s.u_mass_ = mass_from(tabulate(s.u_mesh_, dunavant4()), 3);
  s.u_stiffness_ = stiffness_from(s.u_mesh_);
  return s;
}

Eigen::Matrix<double, 3, 6> FeSpace::strain_matrix(int t) const {
  const auto& g = u_mesh_.gradients[t];
  constexpr double r = std::numbers::sqrt2 / 2.0;
  Eigen::Matrix<double, 3, 6> B = Eigen::Matrix<double, 3, 6>::Zero();
  for (int a = 0; a < 3; ++a) {
    B(0, 2 * a) = g[a][0];
    B(1, 2 * a + 1) = g[a][1];
    B(2, 2 * a) = r * g[a][1];
    B(2, 2 * a + 1) = r * g[a][0];
  }
  return B;
}

Vec FeSpace::strain_of(const Vec& u) const {
  Vec e = Vec::Zero(kVoigt * n_elements());
  for (int t = 0; t < n_elements(); ++t) {
    Eigen::Matrix<double, 6, 1> ul;
    for (int a = 0; a < 3; ++a) {
      ul[2 * a] = u[2 * u_mesh_.triangles[t][a]];
      ul[2 * a + 1] = u[2 * u_mesh_.triangles[t][a] + 1];
    }
    e.segment<3>(kVoigt * t) = strain_matrix(t) * ul;
  }
  return e;
}

Vec FeSpace::average(const Vec& p) const {
  Vec out = Vec::Zero(kVoigt * n_elements());
  for (int t = 0; t < n_elements(); ++t)
    for (int a = 0; a < 3; ++a)
      out.segment<3>(kVoigt * t) += elem_weights_[t][a] * p.segment<3>(kVoigt * elem_nodes_[t][a]);
  return out;
}

Vec FeSpace::average_transpose(const Vec& e) const {
  Vec out = Vec::Zero(kVoigt * n_nodes_);
  for (int t = 0; t < n_elements(); ++t)
    for (int a = 0; a < 3; ++a)
      out.segment<3>(kVoigt * elem_nodes_[t][a]) += elem_weights_[t][a] * e.segment<3>(kVoigt * t);
  return out;
}

Vec FeSpace::divergence_load(const Vec& s) const {
  Vec out = Vec::Zero(n_u_dofs());
  for (int t = 0; t < n_elements(); ++t) {
    const Eigen::Matrix<double, 6, 1> f = elem_area_[t] * strain_matrix(t).transpose() * s.segment<3>(kVoigt * t);
    for (int a = 0; a < 3; ++a) {
      out[2 * u_mesh_.triangles[t][a]] += f[2 * a];
      out[2 * u_mesh_.triangles[t][a] + 1] += f[2 * a + 1];
    }
  }
  return out;
}

Vec FeSpace::lift(const Mat2& G, double ramp) const {
  Vec u(n_u_dofs());
  for (int a = 0; a < n_u_nodes(); ++a) {
    const auto& x = u_mesh_.vertices[a];
    u[2 * a] = ramp * (G(0, 0) * x[0] + G(0, 1) * x[1]);
    u[2 * a + 1] = ramp * (G(1, 0) * x[0] + G(1, 1) * x[1]);
  }
  return u;
}

SpMat FeSpace::weighted_mass(const Vec& coeff_at_quad) const {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(quad4_.size() * 9);
  for (std::size_t k = 0; k < quad4_.size(); ++k) {
    const auto& q = quad4_[k];
    const double w = q.weight * coeff_at_quad[static_cast<Eigen::Index>(k)];
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) trip.emplace_back(q.node[a], q.node[b], w * q.phi[a] * q.phi[b]);
  }
  SpMat M(n_nodes_, n_nodes_);
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

Vec FeSpace::at_quad(const Vec& scalar) const {
  Vec out(static_cast<Eigen::Index>(quad4_.size()));
  for (std::size_t k = 0; k < quad4_.size(); ++k) {
    const auto& q = quad4_[k];
    out[static_cast<Eigen::Index>(k)] =
        q.phi[0] * scalar[q.node[0]] + q.phi[1] * scalar[q.node[1]] + q.phi[2] * scalar[q.node[2]];
  }
  return out;
}

namespace {
template <class Rule>
SymTensor2 tensor_at_point(const Rule& q, const Vec& p) {
  SymTensor2 v;
  for (int a = 0; a < 3; ++a) v += q.phi[a] * tensor_at(p, q.node[a]);
  return v;
}
}  // namespace

Vec FeSpace::tensor_sq_at_quad(const Vec& p) const {
  Vec out(static_cast<Eigen::Index>(quad4_.size()));
  for (std::size_t k = 0; k < quad4_.size(); ++k) {
    const SymTensor2 v = tensor_at_point(quad4_[k], p);
    out[static_cast<Eigen::Index>(k)] = dot(v, v);
  }
  return out;
}

double FeSpace::scalar_gradient_sq(const Vec& a) const { return a.dot(stiffness_ * a); }

double FeSpace::tensor_gradient_sq(const Vec& p) const {
  return quad_form_components(stiffness_, p, kVoigt);
}

double FeSpace::scalar_norm(const Vec& a, NormKind kind) const {
  switch (kind) {
    case NormKind::L2: return std::sqrt(std::max(0.0, a.dot(mass_ * a)));
    case NormKind::H1: return std::sqrt(std::max(0.0, a.dot(mass_ * a) + scalar_gradient_sq(a)));
    case NormKind::L1: {
      double s = 0.0;
      for (const auto& q : quad_edge_)
        s += q.weight * std::abs(q.phi[0] * a[q.node[0]] + q.phi[1] * a[q.node[1]] + q.phi[2] * a[q.node[2]]);
      return s;
    }
    case NormKind::L4: {
      const Vec v = at_quad(a);
      double s = 0.0;
      for (std::size_t k = 0; k < quad4_.size(); ++k) s += quad4_[k].weight * std::pow(v[static_cast<Eigen::Index>(k)], 4);
      return std::pow(s, 0.25);
    }
  }
  return 0.0;
}

double FeSpace::tensor_norm(const Vec& p, NormKind kind) const {
  switch (kind) {
    case NormKind::L2: return std::sqrt(std::max(0.0, quad_form_components(mass_, p, kVoigt)));
    case NormKind::H1:
      return std::sqrt(std::max(0.0, quad_form_components(mass_, p, kVoigt) + tensor_gradient_sq(p)));
    case NormKind::L1: {
      double s = 0.0;
      for (const auto& q : quad_edge_) s += q.weight * tensor_at_point(q, p).norm();
      return s;
    }
    case NormKind::L4: {
      const Vec sq = tensor_sq_at_quad(p);
      double s = 0.0;
      for (std::size_t k = 0; k < quad4_.size(); ++k) s += quad4_[k].weight * sq[static_cast<Eigen::Index>(k)] * sq[static_cast<Eigen::Index>(k)];
      return std::pow(s, 0.25);
    }
  }
  return 0.0;
}

double FeSpace::displacement_norm(const Vec& u, NormKind kind) const {
  const double l2 = quad_form_components(u_mass_, u, 2);
  if (kind == NormKind::L2) return std::sqrt(std::max(0.0, l2));
  if (kind == NormKind::H1) return std::sqrt(std::max(0.0, l2 + quad_form_components(u_stiffness_, u, 2)));
  throw std::invalid_argument("displacement norms support L2 and H1 only");
}

double FeSpace::strain_norm(const Vec& e) const {
  double s = 0.0;
  for (int t = 0; t < n_elements(); ++t) s += elem_area_[t] * e.segment<3>(kVoigt * t).squaredNorm();
  return std::sqrt(s);
}

}  // namespace geodamage
