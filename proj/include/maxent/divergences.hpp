#pragma once

#include <Eigen/Core>

#include "maxent/gmm.hpp"
#include "maxent/models.hpp"
#include "maxent/qmc.hpp"

/// Closed-form divergences between multivariate normals and the model-error
/// statistic delta_K.
///
/// Conventions, for p_i = N(mu_i, S_i) on R^l, D = mu_2 - mu_1:
///
///   KL(p1, p2)   = int p1 log(p1/p2)
///                = 1/2 [tr(S2^-1 S1) + D' S2^-1 D - l + log|S2| - log|S1|]
///
///   chi2(p1, p2) = int p1^2 / p2 - 1.
///     Completing the square in the exponent -(z-mu1)'S1^-1(z-mu1)
///     + 1/2 (z-mu2)'S2^-1(z-mu2) leaves the precision 2 S1^-1 - S2^-1, which
///     is positive definite iff 2 S2 - S1 is. Integrating the Gaussian gives
///       log int p1^2/p2 = log|S2| - 1/2 log|S1| - 1/2 log|2 S2 - S1|
///                         + D' (2 S2 - S1)^-1 D.
///     When 2 S2 - S1 is not positive definite the integral diverges and chi2
///     is reported as +inf.
///
///   H^2(p1, p2)  = 1/2 int (sqrt p1 - sqrt p2)^2 = 1 - BC, with the
///     Bhattacharyya coefficient, S = (S1 + S2)/2,
///       BC = |S1|^{1/4} |S2|^{1/4} / |S|^{1/2} exp(-1/8 D' S^-1 D).
///     With this scaling 2 H^2 <= KL.
///
/// Second log-moments. log p2(z) = c - q(z)/2 with c = -(l/2) log 2pi
/// - 1/2 log|S2| and q(z) = (z - mu2)' B (z - mu2), B = S2^-1. For
/// Z ~ N(mu_i, S_i) write Z - mu2 = d + S_i^{1/2} X with d = mu_i - mu2 and
/// X standard normal. Then q = d'Bd + 2 d'B S_i^{1/2} X + X' S_i^{1/2} B S_i^{1/2} X
/// and the standard quadratic-form moments give
///   E q   = tr(B S_i) + d'Bd,
///   Var q = 2 tr((B S_i)^2) + 4 d' B S_i B d,
/// so E log^2 p2(Z) = (c - E q / 2)^2 + Var q / 4.
namespace maxent::divergences {

struct GaussianPair {
  Eigen::VectorXd mean1;
  Eigen::VectorXd mean2;
  Eigen::MatrixXd cov1;
  Eigen::MatrixXd cov2;

  std::size_t dim() const { return static_cast<std::size_t>(mean1.size()); }
};

struct Divergences {
  double kl;
  double chi2;  // +inf when 2 cov2 - cov1 is not positive definite
  double hellinger_sq;
};

/// Throws InvalidArgument on dimension mismatch or a non-SPD covariance.
Divergences gaussian_divergences(const GaussianPair& p);

/// E^{N(mean, cov)} [log^2 N(z; mean2, cov2)].
double expected_log_sq(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                       const Eigen::VectorXd& mean2, const Eigen::MatrixXd& cov2);

struct EntropyBounds {
  double lhs;         // |Ent(p1) - Ent(p2)|
  double chi2_bound;  // sqrt(E^{p2} log^2 p2) sqrt(chi2) + chi2
  double kl_bound;    // sqrt(2) sqrt((E^{p1} + E^{p2}) log^2 p2) sqrt(KL) + KL
};

/// Both sides of the entropy-difference bounds, in closed form.
EntropyBounds check_entropy_bounds(const GaussianPair& p);

/// sqrt( (1/M) sum_m |G_a(x_m) - G_b(x_m)|_Gamma^2 ) over the given prior points.
double delta_k(const models::ForwardModel& model_a, const models::ForwardModel& model_b,
               const qmc::PointSet& prior_points, const gmm::GaussianNoise& noise);

}  // namespace maxent::divergences
