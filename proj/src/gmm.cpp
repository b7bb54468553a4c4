#include "maxent/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Cholesky>

#include "maxent/error.hpp"

namespace maxent::gmm {

GaussianNoise::GaussianNoise(Eigen::MatrixXd covariance) : covariance_(std::move(covariance)) {
  if (covariance_.rows() == 0 || covariance_.rows() != covariance_.cols())
    throw InvalidArgument("noise covariance must be a non-empty square matrix");
  if (!covariance_.allFinite()) throw InvalidArgument("noise covariance has non-finite entries");
  const double scale = covariance_.cwiseAbs().maxCoeff();
  if ((covariance_ - covariance_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw InvalidArgument("noise covariance is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
  if (llt.info() != Eigen::Success)
    throw InvalidArgument("noise covariance is not positive definite (Cholesky failed)");
  chol_ = llt.matrixL();
  log_det_ = 2.0 * chol_.diagonal().array().log().sum();
}

GaussianNoise GaussianNoise::isotropic(std::size_t dim, double variance) {
  if (!(variance > 0.0)) throw InvalidArgument("noise variance must be positive");
  return GaussianNoise(variance *
                       Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim),
                                                 static_cast<Eigen::Index>(dim)));
}

Eigen::VectorXd GaussianNoise::whiten(const Eigen::VectorXd& v) const {
  return chol_.triangularView<Eigen::Lower>().solve(v);
}

void GaussianNoise::whiten_in_place(std::span<double> v) const {
  Eigen::Map<Eigen::VectorXd> m(v.data(), static_cast<Eigen::Index>(v.size()));
  chol_.triangularView<Eigen::Lower>().solveInPlace(m);
}

double log_sum_exp(std::span<const double> exponents) {
  if (exponents.empty()) return -std::numeric_limits<double>::infinity();
  const double top = *std::max_element(exponents.begin(), exponents.end());
  if (!std::isfinite(top)) return top;
  // Each exp(e - top) in [0, 1] is split into an exact fixed-point value with
  // 100 fractional bits; integer addition is associative, so the sum does not
  // depend on the order of the terms. Terms below 2^-100 truncate to zero.
  unsigned __int128 acc = 0;
  for (double e : exponents) {
    const double shifted = e - top;
    if (shifted < -71.0) continue;
    const double x = std::exp(shifted) * 0x1.0p62;
    const auto hi = static_cast<std::int64_t>(x);
    const auto lo = static_cast<std::int64_t>((x - static_cast<double>(hi)) * 0x1.0p38);
    acc += (static_cast<unsigned __int128>(hi) << 38) + static_cast<unsigned __int128>(lo);
  }
  return top + std::log(std::ldexp(static_cast<double>(acc), -100));
}

GmmSurrogate::GmmSurrogate(RowMatrix centers, GaussianNoise noise)
    : centers_(std::move(centers)), noise_(std::move(noise)) {
  if (centers_.rows() < 1) throw InvalidArgument("surrogate needs at least one center");
  if (static_cast<std::size_t>(centers_.cols()) != noise_.dim())
    throw InvalidArgument("surrogate: center dimension " + std::to_string(centers_.cols()) +
                          " does not match noise dimension " + std::to_string(noise_.dim()));
  if (!centers_.allFinite()) throw InvalidArgument("surrogate: non-finite center");
  if (centers_.rows() >= (Eigen::Index{1} << 26))
    throw InvalidArgument("surrogate: too many centers");
  whitened_ = noise_.chol().triangularView<Eigen::Lower>().solve(centers_.transpose()).transpose();
  log_norm_ = -0.5 * static_cast<double>(dim()) * std::log(2.0 * std::numbers::pi) -
              0.5 * noise_.log_det();
}

double GmmSurrogate::log_density(std::span<const double> y) const {
  if (y.size() != dim())
    throw InvalidArgument("log_density: point has length " + std::to_string(y.size()) +
                          ", expected " + std::to_string(dim()));
  thread_local std::vector<double> w;
  w.assign(y.begin(), y.end());
  noise_.whiten_in_place(w);
  return log_density_whitened(w);
}

double GmmSurrogate::log_density_whitened(std::span<const double> w) const {
  const std::size_t m = size();
  const std::size_t d = dim();
  thread_local std::vector<double> exponents;
  exponents.resize(m);
  const double* c = whitened_.data();
  for (std::size_t i = 0; i < m; ++i, c += d) {
    double r2 = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = c[j] - w[j];
      r2 += diff * diff;
    }
    exponents[i] = -0.5 * r2;
  }
  return log_norm_ + log_sum_exp(exponents) - std::log(static_cast<double>(m));
}

void GmmSurrogate::draw(std::size_t n, Rng& rng, const DrawVisitor& visit) const {
  if (n == 0) throw InvalidArgument("sample: n must be at least 1");
  std::uniform_int_distribution<std::size_t> pick(0, size() - 1);
  std::normal_distribution<double> normal;
  std::vector<double> xi(dim());
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t m = pick(rng);
    for (double& v : xi) v = normal(rng);
    visit(m, xi);
  }
}

RowMatrix GmmSurrogate::sample(std::size_t n, Rng& rng) const {
  const auto d = static_cast<Eigen::Index>(dim());
  RowMatrix out(static_cast<Eigen::Index>(n), d);
  Eigen::Index row = 0;
  draw(n, rng, [&](std::size_t m, std::span<const double> xi) {
    const Eigen::Map<const Eigen::VectorXd> x(xi.data(), d);
    out.row(row++) = centers_.row(static_cast<Eigen::Index>(m)) +
                     (noise_.chol().triangularView<Eigen::Lower>() * x).transpose();
  });
  return out;
}

GmmSurrogate build_surrogate(const models::ForwardModel& model, const qmc::PointSet& prior_points,
                             const GaussianNoise& noise) {
  if (prior_points.dim() != model.input_dim())
    throw InvalidArgument("build_surrogate: prior points have dimension " +
                          std::to_string(prior_points.dim()) + ", model expects " +
                          std::to_string(model.input_dim()));
  if (model.output_dim() != noise.dim())
    throw InvalidArgument("build_surrogate: model output dimension " +
                          std::to_string(model.output_dim()) + " does not match noise dimension " +
                          std::to_string(noise.dim()));
  RowMatrix centers(static_cast<Eigen::Index>(prior_points.count()),
                    static_cast<Eigen::Index>(model.output_dim()));
  for (Eigen::Index m = 0; m < centers.rows(); ++m) {
    try {
      model.eval({prior_points.points.row(m).data(), prior_points.dim()},
                 {centers.row(m).data(), model.output_dim()});
    } catch (const NumericalError& e) {
      throw NumericalError("build_surrogate: forward model failed at point " + std::to_string(m) +
                           ": " + e.what());
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("build_surrogate: forward model failed at point " + std::to_string(m) +
                            ": " + e.what());
    }
  }
  return GmmSurrogate(std::move(centers), noise);
}

void write_centers_csv(const GmmSurrogate& surrogate, std::ostream& out) {
  out << 'm';
  for (std::size_t j = 1; j <= surrogate.dim(); ++j) out << ",z_" << j;
  out << '\n';
  const auto old_precision = out.precision(17);
  for (Eigen::Index m = 0; m < surrogate.centers().rows(); ++m) {
    out << (m + 1);
    for (Eigen::Index j = 0; j < surrogate.centers().cols(); ++j) out << ',' << surrogate.centers()(m, j);
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace maxent::gmm
