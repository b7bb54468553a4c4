#pragma once

#include <functional>
#include <iosfwd>
#include <span>

#include <Eigen/Core>

#include "maxent/models.hpp"
#include "maxent/qmc.hpp"
#include "maxent/random.hpp"

namespace maxent::gmm {

/// Additive noise N(0, Gamma) with its Cholesky factor. Construction fails
/// (InvalidArgument) when Gamma is not symmetric or not positive definite.
class GaussianNoise {
 public:
  explicit GaussianNoise(Eigen::MatrixXd covariance);

  static GaussianNoise isotropic(std::size_t dim, double variance);

  std::size_t dim() const { return static_cast<std::size_t>(covariance_.rows()); }
  const Eigen::MatrixXd& covariance() const { return covariance_; }
  const Eigen::MatrixXd& chol() const { return chol_; }
  double log_det() const { return log_det_; }

  /// L^{-1} v, so that |v|_Gamma^2 = |L^{-1} v|^2.
  Eigen::VectorXd whiten(const Eigen::VectorXd& v) const;
  void whiten_in_place(std::span<double> v) const;

 private:
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd chol_;
  double log_det_;
};

/// Equal-weight Gaussian mixture with shared covariance Gamma:
///
///   pi_M(y) = (1/M) sum_m N(y; z_m, Gamma).
///
/// Centers are also stored whitened (L^{-1} z_m) so a density evaluation costs
/// one triangular solve plus M squared distances.
class GmmSurrogate {
 public:
  GmmSurrogate(RowMatrix centers, GaussianNoise noise);

  std::size_t size() const { return static_cast<std::size_t>(centers_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(centers_.cols()); }
  const RowMatrix& centers() const { return centers_; }
  const RowMatrix& whitened_centers() const { return whitened_; }
  const GaussianNoise& noise() const { return noise_; }

  /// -(d/2) log(2 pi) - (1/2) log det Gamma: the log of each component's peak.
  double log_norm() const { return log_norm_; }

  /// log pi_M(y). Max-shifted log-sum-exp whose inner sum is accumulated
  /// exactly in fixed point, so the result does not depend on the order of
  /// the centers (bitwise).
  double log_density(std::span<const double> y) const;

  /// log pi_M at a point already whitened by L^{-1}.
  double log_density_whitened(std::span<const double> w) const;

  /// n independent draws: uniform component, then z_m + L xi.
  RowMatrix sample(std::size_t n, Rng& rng) const;

  /// Streams the same draws as sample(): for each one calls visit(m, xi) with
  /// the chosen component index and the standard-normal vector xi, so the draw
  /// is z_m + L xi (whitened: w_m + xi).
  using DrawVisitor = std::function<void(std::size_t, std::span<const double>)>;
  void draw(std::size_t n, Rng& rng, const DrawVisitor& visit) const;

 private:
  RowMatrix centers_;
  RowMatrix whitened_;
  GaussianNoise noise_;
  double log_norm_;
};

/// Pushes prior points through the forward model: z_m = G_K(x_m), in order.
/// A model failure is rethrown with the index of the failing point.
GmmSurrogate build_surrogate(const models::ForwardModel& model, const qmc::PointSet& prior_points,
                             const GaussianNoise& noise);

/// CSV dump "m,z_1,...,z_d", one row per center (m is 1-based).
void write_centers_csv(const GmmSurrogate& surrogate, std::ostream& out);

/// log(sum_i exp(e_i)) for exponents e_i; order-independent to the last bit.
double log_sum_exp(std::span<const double> exponents);

}  // namespace maxent::gmm
