#include "sdfem/mesh.hpp"

#include <algorithm>
#include <cmath>

#include "sdfem/error.hpp"

namespace sdfem {

std::string to_string(Region r) {
  switch (r) {
    case Region::S: return "S";
    case Region::X: return "X";
    case Region::Y: return "Y";
    case Region::XY: return "XY";
  }
  return "?";
}

TransitionParams compute_transitions(const MeshParams& p) {
  if (p.N % 2 != 0) throw InvalidArgument("N must be even");
  if (p.N < 4) throw InvalidArgument("N must be at least 4");
  if (!(p.epsilon > 0.0) || !std::isfinite(p.epsilon))
    throw InvalidArgument("epsilon must be positive");
  if (!(p.rho > 0.0)) throw InvalidArgument("rho must be positive");
  if (!(p.beta1 > 0.0) || !(p.beta2 > 0.0))
    throw InvalidArgument("beta1 and beta2 must be positive");

  const double logN = std::log(static_cast<double>(p.N));
  const double half_N = p.N / 2.0;

  TransitionParams t;
  t.lambda_x = std::min(0.5, p.rho * p.epsilon / p.beta1 * logN);
  t.lambda_y = std::min(0.5, p.rho * p.epsilon / p.beta2 * logN);
  t.Hx = (1.0 - t.lambda_x) / half_N;
  t.hx = t.lambda_x / half_N;
  t.Hy = (1.0 - t.lambda_y) / half_N;
  t.hy = t.lambda_y / half_N;
  t.degenerate = t.lambda_x == 0.5 || t.lambda_y == 0.5;
  t.epsilon_assumption_violated = p.epsilon > 1.0 / p.N;
  t.nonstandard_rho = p.rho != 2.5;
  return t;
}

double shishkin_coordinate(int i, int N, double lambda) {
  if (i <= N / 2) return 2.0 * i * (1.0 - lambda) / N;
  return 1.0 - 2.0 * (N - i) * lambda / N;
}

std::vector<double> ShishkinMesh::coordinates(int N, double lambda) {
  std::vector<double> c(N + 1);
  for (int i = 0; i <= N; ++i) c[i] = shishkin_coordinate(i, N, lambda);
  return c;
}

ShishkinMesh::ShishkinMesh(const MeshParams& p)
    : params_(p), transitions_(compute_transitions(p)) {
  const int N = p.N;
  xs_ = coordinates(N, transitions_.lambda_x);
  ys_ = coordinates(N, transitions_.lambda_y);

  triangles_.reserve(2 * static_cast<std::size_t>(N) * N);
  const int half = N / 2;
  for (int j = 0; j < N; ++j) {
    for (int i = 0; i < N; ++i) {
      Region r;
      if (i < half)
        r = j < half ? Region::S : Region::Y;
      else
        r = j < half ? Region::X : Region::XY;
      const int sw = node_id(i, j), se = node_id(i + 1, j);
      const int nw = node_id(i, j + 1), ne = node_id(i + 1, j + 1);
      triangles_.push_back({{sw, se, nw}, Orientation::K1, r, i, j});
      triangles_.push_back({{nw, se, ne}, Orientation::K2, r, i, j});
    }
  }
}

std::size_t ShishkinMesh::num_interior() const {
  const std::size_t n = params_.N - 1;
  return n * n;
}

Point ShishkinMesh::node(int id) const {
  const int stride = params_.N + 1;
  return {xs_[id % stride], ys_[id / stride]};
}

int ShishkinMesh::dof(int i, int j) const {
  const int N = params_.N;
  if (i <= 0 || i >= N || j <= 0 || j >= N) return -1;
  return (j - 1) * (N - 1) + (i - 1);
}

int ShishkinMesh::dof_of_node(int node) const {
  const int stride = params_.N + 1;
  return dof(node % stride, node / stride);
}

std::array<int, 2> ShishkinMesh::dof_indices(int d) const {
  const int n = params_.N - 1;
  return {d % n + 1, d / n + 1};
}

std::array<Point, 3> ShishkinMesh::vertices(int tri) const {
  const auto& v = triangles_[tri].vertices;
  return {node(v[0]), node(v[1]), node(v[2])};
}

double ShishkinMesh::area(int tri) const {
  const auto& t = triangles_[tri];
  return 0.5 * (xs_[t.cell_i + 1] - xs_[t.cell_i]) * (ys_[t.cell_j + 1] - ys_[t.cell_j]);
}

namespace {

bool in_unit_square(Point p) {
  return p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0;
}

// Index of the cell containing c; points on a grid line go to the cell on
// their right (which is the fine side at the transition line).
int locate(const std::vector<double>& c, double v) {
  const auto it = std::upper_bound(c.begin(), c.end(), v);
  const int k = static_cast<int>(it - c.begin()) - 1;
  return std::clamp(k, 0, static_cast<int>(c.size()) - 2);
}

}  // namespace

Region ShishkinMesh::region_of(Point p) const {
  if (!in_unit_square(p)) throw InvalidArgument("point outside the unit square");
  const bool fine_x = p.x >= x_transition();
  const bool fine_y = p.y >= y_transition();
  if (fine_x) return fine_y ? Region::XY : Region::X;
  return fine_y ? Region::Y : Region::S;
}

Region ShishkinMesh::node_region(int i, int j) const {
  return region_of(node(i, j));
}

int ShishkinMesh::triangle_at(Point p) const {
  if (!in_unit_square(p)) throw InvalidArgument("point outside the unit square");
  const int i = locate(xs_, p.x);
  const int j = locate(ys_, p.y);
  const double u = (p.x - xs_[i]) / (xs_[i + 1] - xs_[i]);
  const double v = (p.y - ys_[j]) / (ys_[j + 1] - ys_[j]);
  const int base = 2 * (j * params_.N + i);
  return u + v <= 1.0 ? base : base + 1;
}

nlohmann::json mesh_summary(const ShishkinMesh& mesh) {
  const auto& p = mesh.params();
  const auto& t = mesh.transitions();
  return {
      {"N", p.N},
      {"epsilon", p.epsilon},
      {"rho", p.rho},
      {"beta1", p.beta1},
      {"beta2", p.beta2},
      {"lambda_x", t.lambda_x},
      {"lambda_y", t.lambda_y},
      {"Hx", t.Hx},
      {"hx", t.hx},
      {"Hy", t.Hy},
      {"hy", t.hy},
      {"num_nodes", mesh.num_nodes()},
      {"num_interior_nodes", mesh.num_interior()},
      {"num_triangles", mesh.triangles().size()},
      {"degenerate", t.degenerate},
      {"epsilon_assumption_violated", t.epsilon_assumption_violated},
      {"nonstandard_rho", t.nonstandard_rho},
  };
}

}  // namespace sdfem
