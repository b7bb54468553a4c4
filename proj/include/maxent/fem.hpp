#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace maxent::fem {

struct Point {
  double x;
  double y;
};

/// Uniform triangulation of the unit square: n x n squares, each cut along
/// the diagonal from its lower-left to its upper-right corner. Node (i, j)
/// sits at (i/n, j/n) and has row-major index j*(n+1) + i. Triangles are
/// listed square by square, counter-clockwise.
struct Mesh {
  int n = 0;
  std::vector<Point> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<char> boundary;  // 1 for nodes with a coordinate in {0,1}

  std::size_t node_count() const { return nodes.size(); }
  std::size_t triangle_count() const { return triangles.size(); }
};

Mesh build_mesh(int n);

/// Twice the signed area of triangle t.
double signed_area2(const Mesh& mesh, std::size_t t);

Point centroid(const Mesh& mesh, std::size_t t);

/// Node index of `p`, or throws InvalidArgument("... not a mesh node") when
/// `p` is farther than 1e-12 from every node.
int node_index(const Mesh& mesh, Point p);

double node_value(const Mesh& mesh, const Eigen::VectorXd& u, Point p);

/// Writes "node,x,y" and "triangle,a,b,c" CSV tables.
void dump_mesh_csv(const Mesh& mesh, std::ostream& nodes, std::ostream& triangles);

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// P1 Galerkin discretization of -div(a grad u) = f with u = 0 on the boundary.
///
/// Coefficient and source are elementwise constants (one value per triangle,
/// typically the centroid value). Boundary rows and columns are eliminated, so
/// the stiffness matrix acts on interior nodes only. The sparsity pattern, the
/// element-to-storage map and a fill-reducing ordering are computed once here;
/// every solve afterwards only fills values and factorizes. Const member
/// functions are reentrant.
class PoissonSolver {
 public:
  explicit PoissonSolver(Mesh mesh);

  const Mesh& mesh() const { return mesh_; }
  std::size_t interior_count() const { return interior_nodes_.size(); }
  const std::vector<int>& interior_nodes() const { return interior_nodes_; }

  /// Centroid of every triangle, in triangle order.
  const std::vector<Point>& centroids() const { return centroids_; }

  /// Reduced stiffness matrix (full symmetric storage). `order` permutes the
  /// triangle loop; empty means natural order.
  SparseMatrix stiffness(std::span<const double> coeff, std::span<const int> order = {}) const;

  /// Reduced load vector for a piecewise-constant source.
  Eigen::VectorXd load(std::span<const double> source) const;

  /// Full nodal solution with zeros on the boundary. Sparse Cholesky; falls
  /// back to conjugate gradients (relative residual 1e-10) if the factorization
  /// fails. Throws NumericalError if a coefficient is not positive or both
  /// solvers fail.
  Eigen::VectorXd solve(std::span<const double> coeff, std::span<const double> source) const;

 private:
  Mesh mesh_;
  std::vector<Point> centroids_;
  std::vector<double> area_;
  std::vector<std::array<double, 6>> grad_;  // barycentric gradients per triangle
  std::vector<int> interior_nodes_;
  std::vector<int> dof_;                     // node -> dof or -1
  SparseMatrix pattern_;
  std::vector<std::array<int, 9>> slots_;    // per triangle local (a,b) -> value index or -1
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> ordering_;      // P^{-1}
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int> permutation_;  // P
};

/// Convenience wrapper evaluating coefficient and source at centroids.
Eigen::VectorXd solve_poisson(const Mesh& mesh, const std::function<double(Point)>& coeff,
                              const std::function<double(Point)>& source);

}  // namespace maxent::fem
