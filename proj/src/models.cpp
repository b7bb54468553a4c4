#include "maxent/models.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "maxent/error.hpp"

namespace maxent::models {

Eigen::VectorXd ForwardModel::operator()(std::span<const double> x) const {
  Eigen::VectorXd y(static_cast<Eigen::Index>(output_dim()));
  eval(x, {y.data(), static_cast<std::size_t>(y.size())});
  return y;
}

void ForwardModel::check_dims(std::span<const double> x, std::span<double> y) const {
  if (x.size() != input_dim())
    throw InvalidArgument("forward model: input has length " + std::to_string(x.size()) +
                          ", expected " + std::to_string(input_dim()));
  if (y.size() != output_dim())
    throw InvalidArgument("forward model: output has length " + std::to_string(y.size()) +
                          ", expected " + std::to_string(output_dim()));
}

FunctionModel::FunctionModel(std::size_t input_dim, std::size_t output_dim, Fn fn)
    : input_dim_(input_dim), output_dim_(output_dim), fn_(std::move(fn)) {}

void FunctionModel::eval(std::span<const double> x, std::span<double> y) const {
  check_dims(x, y);
  fn_(x, y);
}

double gaussian_kernel(double t, double gamma) {
  return std::exp(-t * t / (2.0 * gamma * gamma)) / (std::sqrt(2.0 * std::numbers::pi) * gamma);
}

DeconvolutionModel::DeconvolutionModel(const DeconvolutionParams& params) : params_(params) {
  if (params_.k_dim < 2) throw InvalidArgument("deconvolution: K must be at least 2");
  if (!(params_.gamma > 0.0)) throw InvalidArgument("deconvolution: gamma must be positive");
  if (!(params_.sigma_x > 0.0) || !(params_.sigma_eps > 0.0))
    throw InvalidArgument("deconvolution: standard deviations must be positive");
  const int k = params_.k_dim;
  matrix_.resize(k, k);
  const double h = 1.0 / (k - 1);
  for (int c = 0; c < k; ++c) {
    const double weight = std::pow(1.0 - grid_point(c), 4);
    for (int r = 0; r < k; ++r)
      matrix_(r, c) = h * gaussian_kernel(grid_point(r) - grid_point(c), params_.gamma) * weight;
  }
}

double DeconvolutionModel::grid_point(int k) const {
  return static_cast<double>(k) / (params_.k_dim - 1);
}

void DeconvolutionModel::eval(std::span<const double> x, std::span<double> y) const {
  check_dims(x, y);
  Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  Eigen::Map<Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size())).noalias() = matrix_ * xv;
}

double diffusion_coefficient(std::span<const double> x, fem::Point s) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double j = static_cast<double>(i + 1);
    sum += (x[i] - 0.5) / (j * j) * std::sin(std::numbers::pi * j * s.x) *
           std::sin(std::numbers::pi * j * s.y);
  }
  return 1.0 + 0.1 * sum;
}

double coefficient_envelope(int k_terms) {
  double s = 0.0;
  for (int j = 1; j <= k_terms; ++j) s += 1.0 / (static_cast<double>(j) * j);
  return 0.05 * s;
}

EllipticModel::EllipticModel(const EllipticParams& params)
    : params_(params), solver_(fem::build_mesh(params.mesh_n)) {
  if (params_.kl_terms < 1) throw InvalidArgument("elliptic model: K must be positive");
  if (params_.obs_points.empty()) throw InvalidArgument("elliptic model: no observation points");
  if (coefficient_envelope(params_.kl_terms) >= 0.1)
    throw InvalidArgument("elliptic model: coefficient envelope exceeds [0.9, 1.1]");
  const auto& mesh = solver_.mesh();
  for (const auto& p : params_.obs_points) obs_nodes_.push_back(fem::node_index(mesh, p));

  const auto nt = static_cast<Eigen::Index>(mesh.triangle_count());
  basis_.resize(nt, params_.kl_terms);
  source_.resize(mesh.triangle_count());
  for (Eigen::Index t = 0; t < nt; ++t) {
    const fem::Point c = solver_.centroids()[static_cast<std::size_t>(t)];
    for (int i = 0; i < params_.kl_terms; ++i) {
      const double j = i + 1.0;
      basis_(t, i) = std::sin(std::numbers::pi * j * c.x) * std::sin(std::numbers::pi * j * c.y) /
                     (j * j);
    }
    source_[static_cast<std::size_t>(t)] = params_.source_scale * c.x;
  }
}

std::vector<double> EllipticModel::triangle_coefficients(std::span<const double> x) const {
  if (x.size() != input_dim())
    throw InvalidArgument("elliptic model: input has length " + std::to_string(x.size()) +
                          ", expected " + std::to_string(input_dim()));
  bool outside = false;
  Eigen::VectorXd centered(static_cast<Eigen::Index>(x.size()));
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= 0.0 && x[i] <= 1.0)) outside = true;
    centered[static_cast<Eigen::Index>(i)] = x[i] - 0.5;
  }
  if (outside) out_of_cube_.fetch_add(1, std::memory_order_relaxed);
  std::vector<double> a(solver_.mesh().triangle_count());
  Eigen::Map<Eigen::VectorXd> av(a.data(), static_cast<Eigen::Index>(a.size()));
  av.noalias() = basis_ * centered;
  for (double& v : a) v = 1.0 + 0.1 * v;
  return a;
}

Eigen::VectorXd EllipticModel::solve(std::span<const double> x) const {
  return solver_.solve(triangle_coefficients(x), source_);
}

void EllipticModel::eval(std::span<const double> x, std::span<double> y) const {
  check_dims(x, y);
  const Eigen::VectorXd u = solve(x);
  for (std::size_t i = 0; i < obs_nodes_.size(); ++i) y[i] = u[obs_nodes_[i]];
}

}  // namespace maxent::models
