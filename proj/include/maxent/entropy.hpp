#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include <Eigen/Core>

#include "maxent/gmm.hpp"
#include "maxent/qmc.hpp"
#include "maxent/random.hpp"

namespace maxent::entropy {

enum class Method { mc, mc_control_variate, mobius_cubature, analytic };

std::string_view to_string(Method method);

/// A differential entropy value in nats.
struct EntropyEstimate {
  double value = 0.0;
  std::optional<double> std_error;  // present for the sampling estimators
  std::uint64_t m_count = 0;        // surrogate components
  std::uint64_t n_count = 0;        // samples or cubature nodes
  Method method = Method::analytic;
};

/// Sampling estimator of Ent(pi_M): draw Y_n from the surrogate itself
/// (uniform component, then Gaussian noise) and average -log pi_M(Y_n).
/// Unbiased for Ent(pi_M). std_error = sample std of -log pi_M(Y_n) / sqrt(N).
/// Requires n >= 2.
EntropyEstimate mc_entropy(const gmm::GmmSurrogate& surrogate, std::uint64_t n, Rng& rng);

/// Same draws as mc_entropy, with the moment-matched Gaussian G = N(mean, cov)
/// of the mixture as control variate:
///
///   Ent(pi_M) = Ent(G) + E_{pi_M}[log G(Y) - log pi_M(Y)],
///
/// which holds exactly because E_{pi_M}[-log G] = Ent(G) when G matches the
/// first two moments of pi_M. Still unbiased for Ent(pi_M); the variance
/// collapses as pi_M approaches a Gaussian. std_error is the sample std of the
/// corrected summand over sqrt(N).
EntropyEstimate mc_entropy_control_variate(const gmm::GmmSurrogate& surrogate, std::uint64_t n,
                                           Rng& rng);

/// -Q(pi_M log pi_M) with the Moebius-transformed lattice rule `rule`
/// (dimension d, plain variant). Nodes where pi_M underflows contribute 0.
EntropyEstimate mobius_entropy(const gmm::GmmSurrogate& surrogate, const qmc::LatticeRule& rule);

/// As above with N nodes of `generating_vector` and a shift drawn from `rng`.
EntropyEstimate mobius_entropy(const gmm::GmmSurrogate& surrogate, std::uint64_t n, Rng& rng,
                               std::span<const std::uint32_t> generating_vector);

/// (d/2)(1 + log 2 pi) + (1/2) log det Gamma.
double gaussian_entropy(const gmm::GaussianNoise& noise);

/// Same closed form for an arbitrary SPD covariance; throws NumericalError
/// when the Cholesky factorization fails.
double gaussian_entropy(const Eigen::MatrixXd& covariance);

/// Entropy of the evidence of y = A x + eps with x ~ N(0, prior_var I) and
/// eps ~ noise: a Gaussian with covariance prior_var A A^T + Gamma.
double linear_evidence_entropy(const Eigen::MatrixXd& a, double prior_var,
                               const gmm::GaussianNoise& noise);

}  // namespace maxent::entropy
