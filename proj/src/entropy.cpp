#include "maxent/entropy.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "maxent/error.hpp"

namespace maxent::entropy {

namespace {

// Welford running mean and variance.
struct Moments {
  std::uint64_t n = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double v) {
    ++n;
    const double delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (v - mean);
  }
  double std_error() const { return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n)); }
};

double half_log_2pi_e() { return 0.5 * (1.0 + std::log(2.0 * std::numbers::pi)); }

void check_sample_count(std::uint64_t n) {
  if (n < 2) throw InvalidArgument("entropy estimate needs at least 2 samples, got " + std::to_string(n));
}

}  // namespace

std::string_view to_string(Method method) {
  switch (method) {
    case Method::mc: return "mc";
    case Method::mc_control_variate: return "mc_cv";
    case Method::mobius_cubature: return "mobius_cubature";
    case Method::analytic: return "analytic";
  }
  return "unknown";
}

EntropyEstimate mc_entropy(const gmm::GmmSurrogate& surrogate, std::uint64_t n, Rng& rng) {
  check_sample_count(n);
  const auto& whitened = surrogate.whitened_centers();
  std::vector<double> w(surrogate.dim());
  Moments acc;
  surrogate.draw(n, rng, [&](std::size_t m, std::span<const double> xi) {
    for (std::size_t j = 0; j < w.size(); ++j)
      w[j] = whitened(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(j)) + xi[j];
    acc.add(-surrogate.log_density_whitened(w));
  });
  return {acc.mean, acc.std_error(), surrogate.size(), n, Method::mc};
}

EntropyEstimate mc_entropy_control_variate(const gmm::GmmSurrogate& surrogate, std::uint64_t n,
                                           Rng& rng) {
  check_sample_count(n);
  // Everything in whitened coordinates w = L^{-1} y, where each component is
  // N(w_m, I). The log-Jacobian of the whitening cancels in log G - log pi_M.
  const RowMatrix& wc = surrogate.whitened_centers();
  const auto d = static_cast<Eigen::Index>(surrogate.dim());
  const Eigen::RowVectorXd mean = wc.colwise().mean();
  const RowMatrix centered = wc.rowwise() - mean;
  Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(wc.rows());
  cov += Eigen::MatrixXd::Identity(d, d);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw NumericalError("control variate covariance is not SPD");
  const Eigen::MatrixXd lg = llt.matrixL();
  const double half_log_det = lg.diagonal().array().log().sum();
  const double entropy_g = static_cast<double>(d) * half_log_2pi_e() + half_log_det +
                           0.5 * surrogate.noise().log_det();
  const double log_norm_g = -0.5 * static_cast<double>(d) * std::log(2.0 * std::numbers::pi) -
                            half_log_det - 0.5 * surrogate.noise().log_det();

  Eigen::VectorXd w(d);
  Moments acc;
  surrogate.draw(n, rng, [&](std::size_t m, std::span<const double> xi) {
    for (Eigen::Index j = 0; j < d; ++j) w[j] = wc(static_cast<Eigen::Index>(m), j) + xi[static_cast<std::size_t>(j)];
    const double log_pi = surrogate.log_density_whitened({w.data(), static_cast<std::size_t>(d)});
    const Eigen::VectorXd r = lg.triangularView<Eigen::Lower>().solve(w - mean.transpose());
    const double log_g = log_norm_g - 0.5 * r.squaredNorm();
    acc.add(log_g - log_pi);
  });
  return {entropy_g + acc.mean, acc.std_error(), surrogate.size(), n, Method::mc_control_variate};
}

EntropyEstimate mobius_entropy(const gmm::GmmSurrogate& surrogate, const qmc::LatticeRule& rule) {
  if (rule.dim() != surrogate.dim())
    throw InvalidArgument("mobius_entropy: rule dimension " + std::to_string(rule.dim()) +
                          " does not match surrogate dimension " + std::to_string(surrogate.dim()));
  const double q = qmc::mobius_quadrature(
      [&surrogate](std::span<const double> y) {
        const double lp = surrogate.log_density(y);
        // pi log pi = exp(lp) * lp; a node with lp == -inf contributes 0.
        return qmc::LogTerm{lp, std::isfinite(lp) ? lp : 0.0};
      },
      rule);
  return {-q, std::nullopt, surrogate.size(), rule.count(), Method::mobius_cubature};
}

EntropyEstimate mobius_entropy(const gmm::GmmSurrogate& surrogate, std::uint64_t n, Rng& rng,
                               std::span<const std::uint32_t> generating_vector) {
  const auto rule = qmc::LatticeRule::randomized(generating_vector, surrogate.dim(), n, rng);
  return mobius_entropy(surrogate, rule);
}

double gaussian_entropy(const gmm::GaussianNoise& noise) {
  return static_cast<double>(noise.dim()) * half_log_2pi_e() + 0.5 * noise.log_det();
}

double gaussian_entropy(const Eigen::MatrixXd& covariance) {
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) throw NumericalError("gaussian_entropy: covariance is not SPD");
  const Eigen::MatrixXd l = llt.matrixL();
  return static_cast<double>(covariance.rows()) * half_log_2pi_e() +
         l.diagonal().array().log().sum();
}

double linear_evidence_entropy(const Eigen::MatrixXd& a, double prior_var,
                               const gmm::GaussianNoise& noise) {
  if (!(prior_var > 0.0)) throw InvalidArgument("linear_evidence_entropy: prior variance must be positive");
  if (!a.allFinite()) throw InvalidArgument("linear_evidence_entropy: non-finite operator");
  if (static_cast<std::size_t>(a.rows()) != noise.dim())
    throw InvalidArgument("linear_evidence_entropy: operator has " + std::to_string(a.rows()) +
                          " rows, noise dimension is " + std::to_string(noise.dim()));
  const Eigen::MatrixXd evidence_cov = prior_var * a * a.transpose() + noise.covariance();
  return gaussian_entropy(evidence_cov);
}

}  // namespace maxent::entropy
