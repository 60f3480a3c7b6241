#include "geodamage/mesh.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <stdexcept>
#include <utility>

namespace geodamage {

int Mesh::boundary_count() const {
  return static_cast<int>(std::count(on_boundary.begin(), on_boundary.end(), 1));
}

double Mesh::total_area() const {
  double s = 0.0;
  for (double a : areas) s += a;
  return s;
}

void Mesh::write(std::ostream& os) const {
  os.precision(17);
  for (const auto& v : vertices) os << "v " << v[0] << ' ' << v[1] << '\n';
  for (const auto& t : triangles) os << "t " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

Mesh make_mesh(std::vector<Point2> vertices, std::vector<std::array<int, 3>> triangles) {
  Mesh m;
  m.vertices = std::move(vertices);
  m.triangles = std::move(triangles);
  const int nv = m.n_vertices();
  m.areas.reserve(m.triangles.size());
  m.gradients.reserve(m.triangles.size());

  std::map<std::pair<int, int>, int> edge_use;
  for (const auto& t : m.triangles) {
    for (int idx : t)
      if (idx < 0 || idx >= nv) throw std::invalid_argument("triangle references missing vertex");
    const Point2& a = m.vertices[t[0]];
    const Point2& b = m.vertices[t[1]];
    const Point2& c = m.vertices[t[2]];
    const double det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    if (!(det > 0.0)) throw std::invalid_argument("triangle with nonpositive area");
    m.areas.push_back(0.5 * det);
    std::array<Point2, 3> g;
    g[0] = {(b[1] - c[1]) / det, (c[0] - b[0]) / det};
    g[1] = {(c[1] - a[1]) / det, (a[0] - c[0]) / det};
    g[2] = {(a[1] - b[1]) / det, (b[0] - a[0]) / det};
    m.gradients.push_back(g);
    for (int e = 0; e < 3; ++e) {
      int i = t[e], j = t[(e + 1) % 3];
      if (i > j) std::swap(i, j);
      ++edge_use[{i, j}];
    }
  }
  m.on_boundary.assign(nv, 0);
  for (const auto& [edge, count] : edge_use) {
    if (count == 1) {
      m.on_boundary[edge.first] = 1;
      m.on_boundary[edge.second] = 1;
    }
  }
  return m;
}

Mesh build_structured_mesh(double lx, double ly, int nx, int ny) {
  if (!(lx > 0.0) || !(ly > 0.0) || nx < 1 || ny < 1)
    throw std::invalid_argument("structured mesh needs lx, ly > 0 and nx, ny >= 1");
  std::vector<Point2> v;
  v.reserve((nx + 1) * (ny + 1) + nx * ny);
  const double hx = lx / nx, hy = ly / ny;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) v.push_back({i * hx, j * hy});
  const int first_centre = static_cast<int>(v.size());
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) v.push_back({(i + 0.5) * hx, (j + 0.5) * hy});

  auto grid = [nx](int i, int j) { return j * (nx + 1) + i; };
  std::vector<std::array<int, 3>> tris;
  tris.reserve(4 * nx * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int c = first_centre + j * nx + i;
      const int sw = grid(i, j), se = grid(i + 1, j), ne = grid(i + 1, j + 1), nw = grid(i, j + 1);
      tris.push_back({sw, se, c});
      tris.push_back({se, ne, c});
      tris.push_back({ne, nw, c});
      tris.push_back({nw, sw, c});
    }
  }
  return make_mesh(std::move(v), std::move(tris));
}

}  // namespace geodamage
