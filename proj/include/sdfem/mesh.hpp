#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace sdfem {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Input parameters of a Shishkin mesh on the unit square.
///
/// `beta1` and `beta2` are the lower bounds on the convection components
/// that enter the transition points; callers normally pass b1 and b2.
struct MeshParams {
  int N = 8;
  double epsilon = 1e-4;
  double rho = 2.5;
  double beta1 = 1.0;
  double beta2 = 1.0;
};

/// Transition points and the two mesh sizes per direction.
struct TransitionParams {
  double lambda_x = 0.0;
  double lambda_y = 0.0;
  double Hx = 0.0;
  double hx = 0.0;
  double Hy = 0.0;
  double hy = 0.0;
  // lambda saturated at 1/2 in at least one direction: the mesh is uniform there.
  bool degenerate = false;
  // epsilon > 1/N: outside the regime the layer analysis covers.
  bool epsilon_assumption_violated = false;
  // rho differs from the standard 2.5.
  bool nonstandard_rho = false;
};

/// Subdomain tags: coarse region, layer at x = 1, layer at y = 1, corner.
enum class Region { S = 0, X = 1, Y = 2, XY = 3 };

inline constexpr std::array<Region, 4> kAllRegions = {Region::S, Region::X, Region::Y,
                                                      Region::XY};

std::string to_string(Region r);

/// K1 has vertices (x_i,y_j), (x_{i+1},y_j), (x_i,y_{j+1});
/// K2 has vertices (x_i,y_{j+1}), (x_{i+1},y_j), (x_{i+1},y_{j+1}).
enum class Orientation { K1 = 0, K2 = 1 };

struct Triangle {
  std::array<int, 3> vertices;  // global node ids, j * (N + 1) + i
  Orientation orientation;
  Region region;
  int cell_i;
  int cell_j;
};

/// Validates `p` and evaluates the transition parameters.
/// Throws InvalidArgument for odd N, N < 4, nonpositive epsilon, rho or beta.
TransitionParams compute_transitions(const MeshParams& p);

/// Piecewise-uniform Shishkin triangulation of the unit square. Immutable.
///
/// Cells are split along the diagonal from (x_i, y_{j+1}) to (x_{i+1}, y_j).
/// Triangle id of cell (i, j) is 2 * (j * N + i) plus 0 for K1 and 1 for K2.
/// Points on a transition line are assigned to the fine (layer) side.
class ShishkinMesh {
public:
  explicit ShishkinMesh(const MeshParams& p);

  const MeshParams& params() const { return params_; }
  const TransitionParams& transitions() const { return transitions_; }
  int N() const { return params_.N; }

  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  const std::vector<Triangle>& triangles() const { return triangles_; }

  std::size_t num_nodes() const { return xs_.size() * ys_.size(); }
  std::size_t num_interior() const;

  int node_id(int i, int j) const { return j * (params_.N + 1) + i; }
  Point node(int id) const;
  Point node(int i, int j) const { return {xs_[i], ys_[j]}; }

  /// Interior dof index for node (i, j), or -1 on the boundary.
  int dof(int i, int j) const;
  int dof_of_node(int node) const;
  /// Node (i, j) of an interior dof.
  std::array<int, 2> dof_indices(int dof) const;

  double area(int tri) const;
  std::array<Point, 3> vertices(int tri) const;

  Region region_of(Point p) const;
  int triangle_at(Point p) const;
  /// Region of a mesh node under the fine-side convention.
  Region node_region(int i, int j) const;

  double x_transition() const { return xs_[params_.N / 2]; }
  double y_transition() const { return ys_[params_.N / 2]; }

private:
  static std::vector<double> coordinates(int N, double lambda);

  MeshParams params_;
  TransitionParams transitions_;
  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<Triangle> triangles_;
};

/// Shishkin node coordinate x_i (or y_j) as given by the piecewise formula.
double shishkin_coordinate(int i, int N, double lambda);

/// Mesh summary: N, epsilon, transitions, counts and flags.
nlohmann::json mesh_summary(const ShishkinMesh& mesh);

}  // namespace sdfem
