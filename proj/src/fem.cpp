#include "maxent/fem.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>

#include "maxent/error.hpp"

namespace maxent::fem {

Mesh build_mesh(int n) {
  if (n < 1) throw InvalidArgument("build_mesh: n must be at least 1");
  Mesh mesh;
  mesh.n = n;
  const int side = n + 1;
  mesh.nodes.reserve(static_cast<std::size_t>(side) * side);
  mesh.boundary.reserve(static_cast<std::size_t>(side) * side);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      mesh.nodes.push_back({static_cast<double>(i) / n, static_cast<double>(j) / n});
      mesh.boundary.push_back(i == 0 || j == 0 || i == n || j == n ? 1 : 0);
    }
  }
  mesh.triangles.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int ll = j * side + i;
      const int lr = ll + 1;
      const int ul = ll + side;
      const int ur = ul + 1;
      mesh.triangles.push_back({ll, lr, ur});
      mesh.triangles.push_back({ll, ur, ul});
    }
  }
  return mesh;
}

double signed_area2(const Mesh& mesh, std::size_t t) {
  const auto& [a, b, c] = mesh.triangles[t];
  const Point& p = mesh.nodes[a];
  const Point& q = mesh.nodes[b];
  const Point& r = mesh.nodes[c];
  return (q.x - p.x) * (r.y - p.y) - (r.x - p.x) * (q.y - p.y);
}

Point centroid(const Mesh& mesh, std::size_t t) {
  const auto& [a, b, c] = mesh.triangles[t];
  return {(mesh.nodes[a].x + mesh.nodes[b].x + mesh.nodes[c].x) / 3.0,
          (mesh.nodes[a].y + mesh.nodes[b].y + mesh.nodes[c].y) / 3.0};
}

int node_index(const Mesh& mesh, Point p) {
  constexpr double tol = 1e-12;
  const double fi = std::round(p.x * mesh.n);
  const double fj = std::round(p.y * mesh.n);
  if (fi < 0 || fj < 0 || fi > mesh.n || fj > mesh.n || std::abs(fi / mesh.n - p.x) > tol ||
      std::abs(fj / mesh.n - p.y) > tol)
    throw InvalidArgument("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                          ") is not a mesh node");
  return static_cast<int>(fj) * (mesh.n + 1) + static_cast<int>(fi);
}

double node_value(const Mesh& mesh, const Eigen::VectorXd& u, Point p) {
  if (static_cast<std::size_t>(u.size()) != mesh.node_count())
    throw InvalidArgument("node_value: nodal vector size does not match the mesh");
  return u[node_index(mesh, p)];
}

void dump_mesh_csv(const Mesh& mesh, std::ostream& nodes, std::ostream& triangles) {
  nodes << "node,x,y\n";
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
    nodes << i << ',' << mesh.nodes[i].x << ',' << mesh.nodes[i].y << '\n';
  triangles << "triangle,a,b,c\n";
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& [a, b, c] = mesh.triangles[t];
    triangles << t << ',' << a << ',' << b << ',' << c << '\n';
  }
}

PoissonSolver::PoissonSolver(Mesh mesh) : mesh_(std::move(mesh)) {
  const std::size_t nt = mesh_.triangle_count();
  centroids_.reserve(nt);
  area_.reserve(nt);
  grad_.reserve(nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const double det = signed_area2(mesh_, t);
    if (!(det > 0.0)) throw InvalidArgument("mesh triangle with non-positive area");
    const auto& tri = mesh_.triangles[t];
    std::array<double, 6> g{};
    for (int k = 0; k < 3; ++k) {
      const Point& p1 = mesh_.nodes[tri[(k + 1) % 3]];
      const Point& p2 = mesh_.nodes[tri[(k + 2) % 3]];
      g[2 * k] = (p1.y - p2.y) / det;
      g[2 * k + 1] = (p2.x - p1.x) / det;
    }
    centroids_.push_back(centroid(mesh_, t));
    area_.push_back(0.5 * det);
    grad_.push_back(g);
  }

  dof_.assign(mesh_.node_count(), -1);
  for (std::size_t i = 0; i < mesh_.node_count(); ++i) {
    if (!mesh_.boundary[i]) {
      dof_[i] = static_cast<int>(interior_nodes_.size());
      interior_nodes_.push_back(static_cast<int>(i));
    }
  }

  const auto ndof = static_cast<int>(interior_nodes_.size());
  std::vector<Eigen::Triplet<double, int>> entries;
  entries.reserve(9 * nt);
  for (const auto& tri : mesh_.triangles) {
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const int r = dof_[tri[a]];
        const int c = dof_[tri[b]];
        if (r >= 0 && c >= 0) entries.emplace_back(r, c, 1.0);
      }
    }
  }
  pattern_.resize(ndof, ndof);
  pattern_.setFromTriplets(entries.begin(), entries.end());
  pattern_.makeCompressed();

  slots_.resize(nt);
  const int* outer = pattern_.outerIndexPtr();
  const int* inner = pattern_.innerIndexPtr();
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = mesh_.triangles[t];
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const int r = dof_[tri[a]];
        const int c = dof_[tri[b]];
        int slot = -1;
        if (r >= 0 && c >= 0) {
          const int* pos = std::lower_bound(inner + outer[c], inner + outer[c + 1], r);
          slot = static_cast<int>(pos - inner);
        }
        slots_[t][3 * a + b] = slot;
      }
    }
  }

  if (ndof > 0) {
    Eigen::AMDOrdering<int> amd;
    amd(pattern_, ordering_);
    permutation_ = ordering_.inverse();
  }
}

SparseMatrix PoissonSolver::stiffness(std::span<const double> coeff,
                                      std::span<const int> order) const {
  const std::size_t nt = mesh_.triangle_count();
  if (coeff.size() != nt) throw InvalidArgument("stiffness: one coefficient per triangle required");
  if (!order.empty() && order.size() != nt)
    throw InvalidArgument("stiffness: triangle order has the wrong length");
  SparseMatrix k = pattern_;
  double* values = k.valuePtr();
  std::fill(values, values + k.nonZeros(), 0.0);
  for (std::size_t idx = 0; idx < nt; ++idx) {
    const std::size_t t = order.empty() ? idx : static_cast<std::size_t>(order[idx]);
    const auto& g = grad_[t];
    const double scale = coeff[t] * area_[t];
    for (int a = 0; a < 3; ++a) {
      for (int b = a; b < 3; ++b) {
        const double kab = scale * (g[2 * a] * g[2 * b] + g[2 * a + 1] * g[2 * b + 1]);
        const int s1 = slots_[t][3 * a + b];
        if (s1 < 0) continue;
        values[s1] += kab;
        if (a != b) values[slots_[t][3 * b + a]] += kab;
      }
    }
  }
  return k;
}

Eigen::VectorXd PoissonSolver::load(std::span<const double> source) const {
  const std::size_t nt = mesh_.triangle_count();
  if (source.size() != nt) throw InvalidArgument("load: one source value per triangle required");
  Eigen::VectorXd f = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(interior_count()));
  for (std::size_t t = 0; t < nt; ++t) {
    const double share = source[t] * area_[t] / 3.0;
    for (int node : mesh_.triangles[t]) {
      const int r = dof_[node];
      if (r >= 0) f[r] += share;
    }
  }
  return f;
}

Eigen::VectorXd PoissonSolver::solve(std::span<const double> coeff,
                                     std::span<const double> source) const {
  for (std::size_t t = 0; t < coeff.size(); ++t) {
    if (!(coeff[t] > 0.0))
      throw NumericalError("solve_poisson: non-positive coefficient " + std::to_string(coeff[t]) +
                           " at triangle " + std::to_string(t));
  }
  const SparseMatrix k = stiffness(coeff);
  const Eigen::VectorXd f = load(source);
  Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh_.node_count()));
  if (interior_count() == 0) return u;

  Eigen::VectorXd x;
  // The ordering was computed once; per solve only the numeric factorization runs.
  SparseMatrix kp(k.rows(), k.cols());
  kp.selfadjointView<Eigen::Lower>() = k.selfadjointView<Eigen::Lower>().twistedBy(permutation_);
  Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::NaturalOrdering<int>> llt(kp);
  if (llt.info() == Eigen::Success) {
    const Eigen::VectorXd y = llt.solve(permutation_ * f);
    x = ordering_ * y;
  }
  if (llt.info() != Eigen::Success || !x.allFinite()) {
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
    cg.setTolerance(1e-10);
    cg.setMaxIterations(10 * static_cast<Eigen::Index>(interior_count()));
    cg.compute(k);
    x = cg.solve(f);
    if (cg.info() != Eigen::Success || !x.allFinite())
      throw NumericalError("solve_poisson: sparse Cholesky and conjugate gradients both failed");
  }
  for (std::size_t r = 0; r < interior_nodes_.size(); ++r) u[interior_nodes_[r]] = x[static_cast<Eigen::Index>(r)];
  return u;
}

Eigen::VectorXd solve_poisson(const Mesh& mesh, const std::function<double(Point)>& coeff,
                              const std::function<double(Point)>& source) {
  PoissonSolver solver(mesh);
  std::vector<double> a(mesh.triangle_count());
  std::vector<double> f(mesh.triangle_count());
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const Point c = solver.centroids()[t];
    a[t] = coeff(c);
    f[t] = source(c);
  }
  return solver.solve(a, f);
}

}  // namespace maxent::fem
