#include "maxent/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Cholesky>

#include "maxent/error.hpp"

namespace maxent::divergences {

namespace {

Eigen::LLT<Eigen::MatrixXd> factor_spd(const Eigen::MatrixXd& m, const char* what) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) throw InvalidArgument(std::string(what) + " is not SPD");
  return llt;
}

double log_det(const Eigen::LLT<Eigen::MatrixXd>& llt) {
  return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

void validate(const GaussianPair& p) {
  const auto l = p.mean1.size();
  if (l == 0) throw InvalidArgument("gaussian pair: empty dimension");
  if (p.mean2.size() != l || p.cov1.rows() != l || p.cov1.cols() != l || p.cov2.rows() != l ||
      p.cov2.cols() != l)
    throw InvalidArgument("gaussian pair: dimensions disagree");
}

}  // namespace

Divergences gaussian_divergences(const GaussianPair& p) {
  validate(p);
  const auto l1 = factor_spd(p.cov1, "cov1");
  const auto l2 = factor_spd(p.cov2, "cov2");
  const double ld1 = log_det(l1);
  const double ld2 = log_det(l2);
  const Eigen::VectorXd delta = p.mean2 - p.mean1;
  const auto l = static_cast<double>(p.dim());

  const double trace = l2.solve(p.cov1).trace();
  const double maha = delta.dot(l2.solve(delta));
  const double kl = std::max(0.0, 0.5 * (trace + maha - l + ld2 - ld1));

  double chi2 = std::numeric_limits<double>::infinity();
  Eigen::LLT<Eigen::MatrixXd> lc(2.0 * p.cov2 - p.cov1);
  if (lc.info() == Eigen::Success) {
    const double log_int = ld2 - 0.5 * ld1 - 0.5 * log_det(lc) + delta.dot(lc.solve(delta));
    chi2 = std::max(0.0, std::expm1(log_int));
  }

  const Eigen::MatrixXd avg = 0.5 * (p.cov1 + p.cov2);
  const auto la = factor_spd(avg, "average covariance");
  const double log_bc = 0.25 * ld1 + 0.25 * ld2 - 0.5 * log_det(la) - 0.125 * delta.dot(la.solve(delta));
  const double hell = std::clamp(-std::expm1(log_bc), 0.0, 1.0);

  return {kl, chi2, hell};
}

double expected_log_sq(const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                       const Eigen::VectorXd& mean2, const Eigen::MatrixXd& cov2) {
  const auto l2 = factor_spd(cov2, "cov2");
  const auto l = static_cast<double>(mean2.size());
  const double c = -0.5 * l * std::log(2.0 * std::numbers::pi) - 0.5 * log_det(l2);
  const Eigen::VectorXd d = mean - mean2;
  const Eigen::MatrixXd bs = l2.solve(cov);  // B S_i
  const Eigen::VectorXd bd = l2.solve(d);    // B d
  const double eq = bs.trace() + d.dot(bd);
  const double varq = 2.0 * (bs * bs).trace() + 4.0 * bd.dot(cov * bd);
  const double centered = c - 0.5 * eq;
  return centered * centered + 0.25 * varq;
}

EntropyBounds check_entropy_bounds(const GaussianPair& p) {
  const Divergences div = gaussian_divergences(p);
  const auto l1 = factor_spd(p.cov1, "cov1");
  const auto l2 = factor_spd(p.cov2, "cov2");
  // Entropies differ only through the log-determinants.
  const double lhs = 0.5 * std::abs(log_det(l1) - log_det(l2));
  const double e2 = expected_log_sq(p.mean2, p.cov2, p.mean2, p.cov2);
  const double e1 = expected_log_sq(p.mean1, p.cov1, p.mean2, p.cov2);
  const double chi2_bound = std::isfinite(div.chi2)
                                ? std::sqrt(e2) * std::sqrt(div.chi2) + div.chi2
                                : std::numeric_limits<double>::infinity();
  const double kl_bound = std::numbers::sqrt2 * std::sqrt(e1 + e2) * std::sqrt(div.kl) + div.kl;
  return {lhs, chi2_bound, kl_bound};
}

double delta_k(const models::ForwardModel& model_a, const models::ForwardModel& model_b,
               const qmc::PointSet& prior_points, const gmm::GaussianNoise& noise) {
  if (model_a.input_dim() != model_b.input_dim() || model_a.output_dim() != model_b.output_dim())
    throw InvalidArgument("delta_k: models have different dimensions");
  if (model_a.output_dim() != noise.dim())
    throw InvalidArgument("delta_k: model output dimension does not match the noise");
  if (prior_points.count() == 0) throw InvalidArgument("delta_k: no prior points");
  if (prior_points.dim() != model_a.input_dim())
    throw InvalidArgument("delta_k: prior points have the wrong dimension");
  double sum = 0.0;
  for (Eigen::Index m = 0; m < prior_points.points.rows(); ++m) {
    const std::span<const double> x(prior_points.points.row(m).data(), prior_points.dim());
    Eigen::VectorXd diff = model_a(x) - model_b(x);
    noise.whiten_in_place({diff.data(), static_cast<std::size_t>(diff.size())});
    sum += diff.squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(prior_points.count()));
}

}  // namespace maxent::divergences
