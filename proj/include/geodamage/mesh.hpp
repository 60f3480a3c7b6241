#pragma once

#include <array>
#include <iosfwd>
#include <vector>

namespace geodamage {

using Point2 = std::array<double, 2>;

/// Triangulation with precomputed P1 geometry.
struct Mesh {
  std::vector<Point2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<char> on_boundary;
  std::vector<double> areas;
  /// Constant gradients of the three P1 shape functions per triangle.
  std::vector<std::array<Point2, 3>> gradients;

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }
  int boundary_count() const;
  double total_area() const;

  /// One "v x y" line per vertex, then one "t a b c" line per triangle.
  void write(std::ostream& os) const;
};

/// Computes areas, gradients and the topological boundary. Throws on
/// nonpositive (clockwise or degenerate) triangles.
Mesh make_mesh(std::vector<Point2> vertices, std::vector<std::array<int, 3>> triangles);

/// Crossed-diagonal triangulation of [0,lx]x[0,ly]: grid vertices first
/// (row-major, x fastest), then one centre per cell, four triangles per cell.
Mesh build_structured_mesh(double lx, double ly, int nx, int ny);

}  // namespace geodamage
