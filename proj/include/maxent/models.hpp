#pragma once

#include <array>
#include <atomic>
#include <functional>
#include <memory>
#include <span>
#include <string>

#include <Eigen/Core>

#include "maxent/fem.hpp"

namespace maxent::models {

/// Forward map G_K : R^K -> R^d. Implementations are immutable and their
/// eval is safe to call concurrently.
class ForwardModel {
 public:
  virtual ~ForwardModel() = default;

  virtual std::size_t input_dim() const = 0;
  virtual std::size_t output_dim() const = 0;

  /// Writes G_K(x) into `y` (length output_dim()).
  virtual void eval(std::span<const double> x, std::span<double> y) const = 0;

  Eigen::VectorXd operator()(std::span<const double> x) const;

 protected:
  void check_dims(std::span<const double> x, std::span<double> y) const;
};

/// Wraps a callable; handy for identity or offset maps in experiments and tests.
class FunctionModel final : public ForwardModel {
 public:
  using Fn = std::function<void(std::span<const double>, std::span<double>)>;
  FunctionModel(std::size_t input_dim, std::size_t output_dim, Fn fn);

  std::size_t input_dim() const override { return input_dim_; }
  std::size_t output_dim() const override { return output_dim_; }
  void eval(std::span<const double> x, std::span<double> y) const override;

 private:
  std::size_t input_dim_;
  std::size_t output_dim_;
  Fn fn_;
};

struct DeconvolutionParams {
  int k_dim = 20;
  double gamma = 0.1;       // kernel width
  double sigma_x = 10.0;    // prior standard deviation
  double sigma_eps = 2.0;   // noise standard deviation
};

/// Gaussian convolution kernel g(t) = exp(-t^2 / (2 gamma^2)) / (sqrt(2 pi) gamma).
double gaussian_kernel(double t, double gamma);

/// Discretized weighted convolution on the grid t_k = (k-1)/(K-1):
///
///   A_jk = g(t_j - t_k) (1 - t_k)^4 / (K - 1),
///
/// so the last column vanishes. Square: d = K.
class DeconvolutionModel final : public ForwardModel {
 public:
  explicit DeconvolutionModel(const DeconvolutionParams& params = {});

  std::size_t input_dim() const override { return static_cast<std::size_t>(params_.k_dim); }
  std::size_t output_dim() const override { return static_cast<std::size_t>(params_.k_dim); }
  void eval(std::span<const double> x, std::span<double> y) const override;

  const DeconvolutionParams& params() const { return params_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  double grid_point(int k) const;  // k = 0..K-1

 private:
  DeconvolutionParams params_;
  Eigen::MatrixXd matrix_;
};

/// a(s, x) = 1 + 0.1 * sum_{j=1}^{K} j^{-2} (x_j - 1/2) sin(pi j s_1) sin(pi j s_2)
double diffusion_coefficient(std::span<const double> x, fem::Point s);

/// Upper bound on |a(s,x) - 1| over s in the square and x in [0,1]^K:
/// 0.05 * sum_{j<=K} j^{-2} < 0.05 * pi^2 / 6.
double coefficient_envelope(int k_terms);

struct EllipticParams {
  int mesh_n = 64;
  int kl_terms = 100;
  double source_scale = 10.0;  // right-hand side source_scale * s_1
  std::vector<fem::Point> obs_points{{0.25, 0.25}, {0.25, 0.50}, {0.75, 0.50}};
};

/// x -> [u(obs_j; x)]_j for -div(a(., x) grad u) = source_scale * s_1 on the
/// unit square, u = 0 on the boundary, solved with P1 elements. Coefficient and
/// source are evaluated at triangle centroids. Observation points must be mesh
/// nodes (n divisible by 4 for the defaults).
class EllipticModel final : public ForwardModel {
 public:
  explicit EllipticModel(const EllipticParams& params = {});

  std::size_t input_dim() const override { return static_cast<std::size_t>(params_.kl_terms); }
  std::size_t output_dim() const override { return params_.obs_points.size(); }
  void eval(std::span<const double> x, std::span<double> y) const override;

  /// Centroid coefficient of every triangle for parameter x.
  std::vector<double> triangle_coefficients(std::span<const double> x) const;

  /// Full nodal FE solution for parameter x.
  Eigen::VectorXd solve(std::span<const double> x) const;

  const EllipticParams& params() const { return params_; }
  const fem::PoissonSolver& solver() const { return solver_; }

  /// Number of eval calls whose x left the unit cube. Such inputs are still
  /// evaluated with the extended coefficient formula.
  std::uint64_t out_of_cube_count() const { return out_of_cube_.load(); }

 private:
  EllipticParams params_;
  fem::PoissonSolver solver_;
  Eigen::MatrixXd basis_;          // triangles x K: j^-2 sin(pi j c1) sin(pi j c2)
  std::vector<double> source_;     // per triangle
  std::vector<int> obs_nodes_;
  mutable std::atomic<std::uint64_t> out_of_cube_{0};
};

}  // namespace maxent::models
