#include <gtest/gtest.h>

#include <cmath>

#include "geodamage/fe_space.hpp"

using namespace geodamage;

namespace {

Vec coordinate_field(const FeSpace& fe, int axis) {
  Vec f(fe.n_nodes());
  for (int i = 0; i < fe.n_nodes(); ++i) f[i] = fe.u_mesh().vertices[i][axis];
  return f;
}

}  // namespace

TEST(Mesh, SingleCellCrossedDiagonals) {
  const Mesh m = build_structured_mesh(1.0, 1.0, 1, 1);
  EXPECT_EQ(m.n_triangles(), 4);
  EXPECT_EQ(m.n_vertices(), 5);
  EXPECT_EQ(m.boundary_count(), 4);
}

TEST(Mesh, AreaAndBoundary) {
  EXPECT_NEAR(build_structured_mesh(2.0, 1.0, 2, 1).total_area(), 2.0, 1e-14);
  EXPECT_EQ(build_structured_mesh(1.0, 1.0, 4, 4).boundary_count(), 16);
  const Mesh m8 = build_structured_mesh(1.0, 1.0, 8, 8);
  EXPECT_EQ(m8.n_vertices(), 145);
  EXPECT_EQ(m8.n_triangles(), 256);
}

TEST(Mesh, RejectsClockwiseTriangles) {
  EXPECT_THROW(make_mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 2, 1}}), std::invalid_argument);
  EXPECT_THROW(make_mesh({{0, 0}, {1, 0}}, {{0, 1, 2}}), std::invalid_argument);
  EXPECT_THROW(build_structured_mesh(1.0, 1.0, 0, 1), std::invalid_argument);
}

TEST(FeSpace, MassIntegratesConstants) {
  const FeSpace fe = FeSpace::structured(build_structured_mesh(1.0, 1.0, 4, 4));
  const Vec one = Vec::Ones(fe.n_nodes());
  EXPECT_NEAR(one.dot(fe.mass() * one), 1.0, 1e-13);
  EXPECT_NEAR(fe.lumped().sum(), 1.0, 1e-13);
  EXPECT_NEAR(fe.measure(), 1.0, 1e-14);
}

TEST(FeSpace, StiffnessKernelAndLinearField) {
  const FeSpace fe = FeSpace::structured(build_structured_mesh(1.0, 1.0, 4, 4));
  const Vec one = Vec::Ones(fe.n_nodes());
  EXPECT_LT((fe.stiffness() * one).norm(), 1e-12);
  const Vec x = coordinate_field(fe, 0);
  EXPECT_NEAR(fe.scalar_gradient_sq(x), 1.0, 1e-12);
  EXPECT_NEAR(std::pow(fe.scalar_norm(x, NormKind::L2), 2), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(fe.scalar_norm(x, NormKind::L1), 0.5, 1e-12);
  EXPECT_NEAR(fe.scalar_norm(one, NormKind::L4), 1.0, 1e-12);
}

TEST(FeSpace, LiftReproducesAffineDatum) {
  const FeSpace fe = FeSpace::structured(build_structured_mesh(1.0, 1.0, 3, 3));
  Mat2 G;
  G << 0.0, 0.5, 0.5, -0.3;
  const Vec u = fe.lift(G, 2.0);
  for (int a = 0; a < fe.n_u_nodes(); ++a) {
    const auto& x = fe.u_mesh().vertices[a];
    EXPECT_NEAR(u[2 * a], 2.0 * (0.5 * x[1]), 1e-14);
    EXPECT_NEAR(u[2 * a + 1], 2.0 * (0.5 * x[0] - 0.3 * x[1]), 1e-14);
  }
  const Vec e = fe.strain_of(u);
  for (int t = 0; t < fe.n_elements(); ++t) {
    EXPECT_NEAR(e[3 * t], 0.0, 1e-13);
    EXPECT_NEAR(e[3 * t + 1], -0.6, 1e-13);
    EXPECT_NEAR(e[3 * t + 2], std::sqrt(2.0) * 1.0, 1e-13);
  }
}

TEST(FeSpace, AverageTransposeIsAdjoint) {
  const FeSpace fe = FeSpace::structured(build_structured_mesh(1.0, 1.0, 3, 2));
  const Vec p = Vec::LinSpaced(kVoigt * fe.n_nodes(), -1.0, 2.0);
  const Vec e = Vec::LinSpaced(kVoigt * fe.n_elements(), 0.5, -1.5);
  EXPECT_NEAR(fe.average(p).dot(e), p.dot(fe.average_transpose(e)), 1e-12);
}

TEST(FeSpace, HomogeneousMode) {
  const FeSpace fe = FeSpace::homogeneous(2.0, 1.5);
  EXPECT_TRUE(fe.is_homogeneous());
  EXPECT_EQ(fe.n_nodes(), 1);
  EXPECT_NEAR(fe.measure(), 3.0, 1e-14);
  const Vec a = Vec::Constant(1, 0.5);
  EXPECT_NEAR(fe.scalar_norm(a, NormKind::L2), 0.5 * std::sqrt(3.0), 1e-14);
  EXPECT_NEAR(fe.scalar_gradient_sq(a), 0.0, 1e-15);
  Mat2 G;
  G << 1.0, 0.0, 0.0, 2.0;
  const Vec e = fe.strain_of(fe.lift(G, 1.0));
  EXPECT_NEAR(e[0], 1.0, 1e-13);
  EXPECT_NEAR(e[1], 2.0, 1e-13);
}

TEST(FeSpace, NormKindNames) {
  EXPECT_EQ(parse_norm_kind("H1"), NormKind::H1);
  EXPECT_THROW(parse_norm_kind("W11"), std::invalid_argument);
}
