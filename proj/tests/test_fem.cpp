#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "maxent/error.hpp"
#include "maxent/fem.hpp"
#include "maxent/harness.hpp"
#include "maxent/random.hpp"

using namespace maxent;
using fem::Point;

namespace {

double manufactured(Point p) { return std::sin(std::numbers::pi * p.x) * std::sin(std::numbers::pi * p.y); }

double manufactured_error(int n) {
  const auto mesh = fem::build_mesh(n);
  const auto u = fem::solve_poisson(
      mesh, [](Point) { return 1.0; },
      [](Point p) { return 2.0 * std::numbers::pi * std::numbers::pi * manufactured(p); });
  double err = 0.0;
  for (std::size_t i = 0; i < mesh.node_count(); ++i)
    err = std::max(err, std::abs(u(static_cast<Eigen::Index>(i)) - manufactured(mesh.nodes[i])));
  return err;
}

std::vector<double> constant(std::size_t n, double v) { return std::vector<double>(n, v); }

}  // namespace

TEST(Mesh, Counts) {
  const auto m64 = fem::build_mesh(64);
  EXPECT_EQ(m64.node_count(), 4225u);
  EXPECT_EQ(m64.triangle_count(), 8192u);

  const auto m1 = fem::build_mesh(1);
  EXPECT_EQ(m1.node_count(), 4u);
  EXPECT_EQ(m1.triangle_count(), 2u);
  EXPECT_EQ(std::count(m1.boundary.begin(), m1.boundary.end(), 1), 4);

  const auto m2 = fem::build_mesh(2);
  EXPECT_EQ(m2.node_count(), 9u);
  EXPECT_EQ(m2.triangle_count(), 8u);
  EXPECT_EQ(std::count(m2.boundary.begin(), m2.boundary.end(), 0), 1);
  EXPECT_EQ(m2.boundary[4], 0);
  EXPECT_EQ(m2.nodes[4].x, 0.5);
  EXPECT_EQ(m2.nodes[4].y, 0.5);

  EXPECT_THROW(fem::build_mesh(0), InvalidArgument);
}

TEST(Mesh, Invariants) {
  for (int n : {1, 3, 8}) {
    const auto mesh = fem::build_mesh(n);
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
      EXPECT_GT(fem::signed_area2(mesh, t), 0.0);
      EXPECT_NEAR(fem::signed_area2(mesh, t), 1.0 / (n * n), 1e-15);
    }
    for (std::size_t i = 0; i < mesh.node_count(); ++i) {
      const auto p = mesh.nodes[i];
      const bool on_edge = p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0;
      EXPECT_EQ(mesh.boundary[i] != 0, on_edge);
    }
  }
}

TEST(Mesh, CsvDump) {
  const auto mesh = fem::build_mesh(1);
  std::ostringstream nodes, tris;
  fem::dump_mesh_csv(mesh, nodes, tris);
  EXPECT_EQ(nodes.str().substr(0, 11), "node,x,y\n0,");
  const std::string table = tris.str();
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 3);
}

TEST(NodeValue, Examples) {
  const auto mesh = fem::build_mesh(4);
  Eigen::VectorXd u(static_cast<Eigen::Index>(mesh.node_count()));
  std::iota(u.begin(), u.end(), 100.0);
  EXPECT_EQ(fem::node_value(mesh, u, {0.0, 0.0}), 100.0);
  EXPECT_EQ(fem::node_index(mesh, {0.25, 0.25}), 6);
  EXPECT_EQ(fem::node_value(mesh, u, {0.25, 0.25}), 106.0);
  try {
    fem::node_value(mesh, u, {0.3, 0.3});
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("not a mesh node"), std::string::npos);
  }
  EXPECT_THROW(fem::node_value(mesh, Eigen::VectorXd::Zero(3), {0.0, 0.0}), InvalidArgument);
}

TEST(Poisson, ManufacturedSolutionConvergesQuadratically) {
  std::vector<double> h, err;
  for (int n : {8, 16, 32, 64}) {
    h.push_back(1.0 / n);
    err.push_back(manufactured_error(n));
  }
  const double slope = harness::fit_loglog(h, err).first;
  EXPECT_GE(slope, 1.8);
  EXPECT_LE(slope, 2.2);
  const double ratio = err[2] / err[3];
  EXPECT_GT(ratio, 3.0);
  EXPECT_LT(ratio, 5.0);
}

TEST(Poisson, ZeroSourceGivesZero) {
  const auto mesh = fem::build_mesh(8);
  const auto u = fem::solve_poisson(mesh, [](Point p) { return 1.0 + p.x; }, [](Point) { return 0.0; });
  EXPECT_EQ(u.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Poisson, ConstantCoefficientScaling) {
  const auto mesh = fem::build_mesh(16);
  const auto f = [](Point p) { return 10.0 * p.x; };
  const auto base = fem::solve_poisson(mesh, [](Point) { return 1.0; }, f);
  for (double c : {0.25, 7.0}) {
    const auto u = fem::solve_poisson(mesh, [c](Point) { return c; }, f);
    EXPECT_LT((u - base / c).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Poisson, MaximumPrinciple) {
  Rng rng(3);
  const auto mesh = fem::build_mesh(16);
  const fem::PoissonSolver solver(mesh);
  std::vector<double> source(mesh.triangle_count());
  for (int trial = 0; trial < 10; ++trial) {
    for (auto& v : source) v = uniform01(rng) < 0.2 ? 5.0 * uniform01(rng) : 0.0;
    const auto u = solver.solve(constant(mesh.triangle_count(), 1.0), source);
    EXPECT_GE(u.minCoeff(), 0.0);
  }
}

TEST(Poisson, BoundaryValuesAreZero) {
  const auto mesh = fem::build_mesh(8);
  const auto u = fem::solve_poisson(mesh, [](Point) { return 1.0; }, [](Point) { return 1.0; });
  for (std::size_t i = 0; i < mesh.node_count(); ++i)
    if (mesh.boundary[i]) EXPECT_EQ(u(static_cast<Eigen::Index>(i)), 0.0);
}

TEST(Poisson, RejectsNonPositiveCoefficient) {
  const auto mesh = fem::build_mesh(4);
  EXPECT_THROW(fem::solve_poisson(mesh, [](Point p) { return p.x - 0.5; }, [](Point) { return 1.0; }),
               NumericalError);
}

TEST(Stiffness, SymmetricToTheBit) {
  Rng rng(4);
  const fem::PoissonSolver solver(fem::build_mesh(12));
  std::vector<double> coeff(solver.mesh().triangle_count());
  for (auto& v : coeff) v = 0.5 + uniform01(rng);
  const fem::SparseMatrix k = solver.stiffness(coeff);
  const fem::SparseMatrix kt = k.transpose();
  EXPECT_EQ(k.rows(), static_cast<Eigen::Index>(solver.interior_count()));
  EXPECT_EQ(Eigen::MatrixXd(k - kt).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_GT(Eigen::VectorXd(k.diagonal()).minCoeff(), 0.0);
}

TEST(Stiffness, IndependentOfAssemblyOrder) {
  Rng rng(5);
  const fem::PoissonSolver solver(fem::build_mesh(12));
  const std::size_t nt = solver.mesh().triangle_count();
  std::vector<double> coeff(nt);
  for (auto& v : coeff) v = 0.5 + uniform01(rng);
  const Eigen::MatrixXd natural(solver.stiffness(coeff));
  std::vector<int> order(nt);
  std::iota(order.begin(), order.end(), 0);
  for (int trial = 0; trial < 3; ++trial) {
    std::shuffle(order.begin(), order.end(), rng);
    const Eigen::MatrixXd shuffled(solver.stiffness(coeff, order));
    EXPECT_LT((natural - shuffled).cwiseAbs().maxCoeff(), 1e-14);
  }
  EXPECT_THROW(solver.stiffness(coeff, std::vector<int>(3, 0)), InvalidArgument);
  EXPECT_THROW(solver.stiffness(std::vector<double>(3, 1.0)), InvalidArgument);
}

TEST(Stiffness, ConstantCoefficientIsFivePointLaplacian) {
  const fem::PoissonSolver solver(fem::build_mesh(4));
  const Eigen::MatrixXd k(solver.stiffness(constant(solver.mesh().triangle_count(), 1.0)));
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    EXPECT_NEAR(k(i, i), 4.0, 1e-14);
    for (Eigen::Index j = 0; j < k.cols(); ++j)
      if (j != i) EXPECT_TRUE(std::abs(k(i, j)) < 1e-14 || std::abs(k(i, j) + 1.0) < 1e-14);
  }
}
