#include "sdfem/assembly.hpp"

#include <cmath>
#include <ostream>

#include "sdfem/error.hpp"
#include "sdfem/quadrature.hpp"

namespace sdfem {

TriangleGeometry TriangleGeometry::of(const ShishkinMesh& mesh, int tri,
                                      const StreamlineFrame& frame) {
  TriangleGeometry t;
  t.p = mesh.vertices(tri);
  const auto& p = t.p;
  const double det = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
  t.area = 0.5 * std::abs(det);
  for (int k = 0; k < 3; ++k) {
    const Point& a = p[(k + 1) % 3];
    const Point& b = p[(k + 2) % 3];
    t.grad[k] = {(a.y - b.y) / det, (b.x - a.x) / det};
    t.grad_beta[k] = t.grad[k].x * frame.beta.x + t.grad[k].y * frame.beta.y;
    t.grad_eta[k] = t.grad[k].x * frame.eta.x + t.grad[k].y * frame.eta.y;
  }
  return t;
}

FEFunction::FEFunction(std::shared_ptr<const ShishkinMesh> mesh, Vector dofs)
    : mesh_(std::move(mesh)), dofs_(std::move(dofs)) {
  if (static_cast<std::size_t>(dofs_.size()) != mesh_->num_interior())
    throw InvalidArgument("dof vector size does not match the mesh");
}

double FEFunction::nodal(int i, int j) const {
  const int d = mesh_->dof(i, j);
  return d < 0 ? 0.0 : dofs_[d];
}

double FEFunction::nodal(int node) const {
  const int d = mesh_->dof_of_node(node);
  return d < 0 ? 0.0 : dofs_[d];
}

std::array<double, 3> FEFunction::triangle_values(int tri) const {
  const auto& v = mesh_->triangles()[tri].vertices;
  return {nodal(v[0]), nodal(v[1]), nodal(v[2])};
}

Point FEFunction::gradient(int tri) const {
  const auto t = TriangleGeometry::of(*mesh_, tri);
  const auto u = triangle_values(tri);
  Point g{0.0, 0.0};
  for (int k = 0; k < 3; ++k) {
    g.x += u[k] * t.grad[k].x;
    g.y += u[k] * t.grad[k].y;
  }
  return g;
}

double FEFunction::directional_grad(int tri, Point dir) const {
  const Point g = gradient(tri);
  return g.x * dir.x + g.y * dir.y;
}

double FEFunction::evaluate(Point x) const {
  const int tri = mesh_->triangle_at(x);
  const auto p = mesh_->vertices(tri);
  const double det = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
  const double l1 = ((x.x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (x.y - p[0].y)) / det;
  const double l2 = ((p[1].x - p[0].x) * (x.y - p[0].y) - (x.x - p[0].x) * (p[1].y - p[0].y)) / det;
  const double l0 = 1.0 - l1 - l2;
  const auto u = triangle_values(tri);
  return l0 * u[0] + l1 * u[1] + l2 * u[2];
}

FormCoefficients form_coefficients(const ShishkinMesh& mesh, const ProblemData& prob,
                                   const StabilizationConfig& stab, int tri) {
  const Region r = mesh.triangles()[tri].region;
  const int N = mesh.N();
  return {prob.epsilon, stab.eps_hat(r, prob.epsilon, N), prob.b_norm(), prob.c,
          stab.delta(r, N)};
}

namespace {

void check_coefficients(const ProblemData& prob, const StabilizationConfig& stab) {
  for (double v : {prob.epsilon, prob.b1, prob.b2, prob.c, stab.c_star})
    if (!std::isfinite(v)) throw InvalidArgument("non-finite coefficient");
  if (!(prob.epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (prob.c < 0.0) throw InvalidArgument("c must be nonnegative");
  if (stab.c_star < 0.0) throw InvalidArgument("C* must be nonnegative");
  if (!prob.f) throw InvalidArgument("source term is empty");
}

}  // namespace

AssembledSystem assemble(std::shared_ptr<const ShishkinMesh> mesh, const ProblemData& prob,
                         const StabilizationConfig& stab, int load_quad_level) {
  check_coefficients(prob, stab);
  const auto frame = StreamlineFrame::from(prob.b1, prob.b2);
  const int n = static_cast<int>(mesh->num_interior());
  const auto& rule = quad_rule(load_quad_level);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(mesh->triangles().size() * 9);
  Vector F = Vector::Zero(n);

  for (int tri = 0; tri < static_cast<int>(mesh->triangles().size()); ++tri) {
    const auto t = TriangleGeometry::of(*mesh, tri, frame);
    const auto k = form_coefficients(*mesh, prob, stab, tri);
    const auto& verts = mesh->triangles()[tri].vertices;
    std::array<int, 3> dof;
    for (int a = 0; a < 3; ++a) dof[a] = mesh->dof_of_node(verts[a]);

    for (int a = 0; a < 3; ++a) {  // test function
      if (dof[a] < 0) continue;
      for (int m = 0; m < 3; ++m) {  // trial function
        if (dof[m] < 0) continue;
        const double mass = t.area * (a == m ? 1.0 / 6.0 : 1.0 / 12.0);
        double v = t.area * (k.epsilon * t.grad_beta[m] * t.grad_beta[a] +
                             k.eps_hat * t.grad_eta[m] * t.grad_eta[a]);
        v += k.b * t.grad_beta[m] * t.area / 3.0 + k.c * mass;
        v += k.delta * k.b * t.grad_beta[a] * t.area * (k.b * t.grad_beta[m] + k.c / 3.0);
        triplets.emplace_back(dof[a], dof[m], v);
      }
      // Load: phi_a is linear with barycentric coordinate a.
      const double sd = k.delta * k.b * t.grad_beta[a];
      double load = 0.0;
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const auto& l = rule.bary[q];
        const Point x{l[0] * t.p[0].x + l[1] * t.p[1].x + l[2] * t.p[2].x,
                      l[0] * t.p[0].y + l[1] * t.p[1].y + l[2] * t.p[2].y};
        load += rule.weights[q] * prob.f(x) * (l[a] + sd);
      }
      F[dof[a]] += load * t.area;
    }
  }

  SparseMatrix A(n, n);
  A.setFromTriplets(triplets.begin(), triplets.end());
  A.makeCompressed();
  return {std::move(mesh), prob, stab, frame, std::move(A), std::move(F), load_quad_level};
}

double bilinear_form(const AssembledSystem& sys, const FEFunction& u, const FEFunction& v) {
  if (&u.mesh() != sys.mesh.get() || &v.mesh() != sys.mesh.get())
    throw InvalidArgument("FE functions live on a different mesh");
  const auto& mesh = *sys.mesh;
  double sum = 0.0;
  for (int tri = 0; tri < static_cast<int>(mesh.triangles().size()); ++tri) {
    const auto t = TriangleGeometry::of(mesh, tri, sys.frame);
    const auto k = form_coefficients(mesh, sys.problem, sys.stab, tri);
    const auto uu = u.triangle_values(tri), vv = v.triangle_values(tri);
    double ub = 0, ue = 0, vb = 0, ve = 0;
    for (int a = 0; a < 3; ++a) {
      ub += uu[a] * t.grad_beta[a];
      ue += uu[a] * t.grad_eta[a];
      vb += vv[a] * t.grad_beta[a];
      ve += vv[a] * t.grad_eta[a];
    }
    const double u_mean = (uu[0] + uu[1] + uu[2]) / 3.0;
    const double v_mean = (vv[0] + vv[1] + vv[2]) / 3.0;
    const double uv = (uu[0] * vv[0] + uu[1] * vv[1] + uu[2] * vv[2] +
                       (uu[0] + uu[1] + uu[2]) * (vv[0] + vv[1] + vv[2])) / 12.0;
    double e = k.epsilon * ub * vb + k.eps_hat * ue * ve;
    e += k.b * ub * v_mean + k.c * uv;
    e += k.delta * k.b * vb * (k.b * ub + k.c * u_mean);
    sum += e * t.area;
  }
  return sum;
}

double load_functional(const AssembledSystem& sys, const FEFunction& v, int quad_level) {
  const auto& mesh = *sys.mesh;
  const auto& rule = quad_rule(quad_level);
  double sum = 0.0;
  for (int tri = 0; tri < static_cast<int>(mesh.triangles().size()); ++tri) {
    const auto t = TriangleGeometry::of(mesh, tri, sys.frame);
    const auto k = form_coefficients(mesh, sys.problem, sys.stab, tri);
    const auto vv = v.triangle_values(tri);
    double vb = 0;
    for (int a = 0; a < 3; ++a) vb += vv[a] * t.grad_beta[a];
    const double sd = k.delta * k.b * vb;
    double local = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const auto& l = rule.bary[q];
      const Point x{l[0] * t.p[0].x + l[1] * t.p[1].x + l[2] * t.p[2].x,
                    l[0] * t.p[0].y + l[1] * t.p[1].y + l[2] * t.p[2].y};
      const double val = l[0] * vv[0] + l[1] * vv[1] + l[2] * vv[2];
      local += rule.weights[q] * sys.problem.f(x) * (val + sd);
    }
    sum += local * t.area;
  }
  return sum;
}

void write_coo(std::ostream& os, const SparseMatrix& A) {
  os << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  os.precision(17);
  for (int col = 0; col < A.outerSize(); ++col)
    for (SparseMatrix::InnerIterator it(A, col); it; ++it)
      os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

}  // namespace sdfem
