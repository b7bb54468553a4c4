#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "maxent/random.hpp"

namespace maxent {

/// Dense row-major matrix; one row per point.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

namespace qmc {

enum class LatticeVariant { plain, tent };

/// Randomly shifted rank-1 lattice rule
///
///   X_m = frac(z * m / M + shift),   m = 1, ..., M,
///
/// optionally followed by the componentwise tent map 1 - |2x - 1|.
/// Immutable once constructed; validated on construction.
class LatticeRule {
 public:
  LatticeRule(std::vector<std::uint32_t> generating_vector, std::uint64_t count,
              std::vector<double> shift, LatticeVariant variant = LatticeVariant::plain);

  /// Takes the first `dim` entries of `generating_vector` reduced mod `count` and
  /// draws the shift uniformly on [0,1)^dim from `rng`.
  static LatticeRule randomized(std::span<const std::uint32_t> generating_vector,
                                std::size_t dim, std::uint64_t count, Rng& rng,
                                LatticeVariant variant = LatticeVariant::plain);

  std::size_t dim() const { return generating_vector_.size(); }
  std::uint64_t count() const { return count_; }
  const std::vector<std::uint32_t>& generating_vector() const { return generating_vector_; }
  const std::vector<double>& shift() const { return shift_; }
  LatticeVariant variant() const { return variant_; }

  /// Component j of point m, m in 1..count.
  double coordinate(std::uint64_t m, std::size_t j) const;

 private:
  std::vector<std::uint32_t> generating_vector_;
  std::uint64_t count_;
  std::vector<double> shift_;
  LatticeVariant variant_;
};

enum class Domain { unit_cube, real_line };

struct PointSet {
  RowMatrix points;  // count x dim
  Domain domain = Domain::unit_cube;

  std::size_t count() const { return static_cast<std::size_t>(points.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(points.cols()); }
};

/// All points of the rule, m = 1..M in order.
PointSet lattice_points(const LatticeRule& rule);

/// Uniform shift on [0,1)^dim.
std::vector<double> draw_shift(std::size_t dim, Rng& rng);

/// Componentwise tent map 1 - |2x - 1|.
inline double tent(double x) { return 1.0 - std::abs(2.0 * x - 1.0); }

/// Smallest and largest values fed to the inverse normal CDF.
inline constexpr double kUnitClampLo = 0x1.0p-53;
inline constexpr double kUnitClampHi = 1.0 - 0x1.0p-53;

/// Componentwise inverse standard-normal CDF of a unit-cube point set.
/// Components are clamped to [2^-53, 1 - 2^-53] first; NaN is rejected.
PointSet map_to_gaussian(const PointSet& points);

/// A nonnegative-or-signed integrand value held as factor * exp(log_scale).
/// factor == 0 (or log_scale == -inf) means the node contributes exactly zero.
struct LogTerm {
  double log_scale;
  double factor;
};

using Integrand = std::function<double(std::span<const double>)>;
using LogIntegrand = std::function<LogTerm(std::span<const double>)>;

/// Randomized Moebius-transformed lattice rule over R^d:
///
///   Q(f) = (1/N) sum_n prod_j psi'(X_n^(j)) f(Psi(X_n)),
///   psi(x) = -cot(pi x),  psi'(x) = pi / sin^2(pi x).
///
/// The Jacobian product is accumulated as a log and combined with the
/// integrand's own log scale, so Gaussian tails against the exploding weight
/// near the cube boundary never overflow. Throws NumericalError when the
/// accumulated sum is not finite. `rule` must be plain.
double mobius_quadrature(const LogIntegrand& f, const LatticeRule& rule);
double mobius_quadrature(const Integrand& f, const LatticeRule& rule);

/// psi(u) and log psi'(u) of the Moebius rule; u is clamped into the open cube.
double mobius_map(double u);
double mobius_log_jacobian(double u);

/// Reads a generating vector file: one base-10 nonnegative integer per line,
/// blank lines and lines starting with '#' ignored. Returns the first `dim`
/// entries reduced modulo `max_count`.
std::vector<std::uint32_t> load_generating_vector(const std::filesystem::path& path, int dim,
                                                  std::int64_t max_count);

/// Every entry of the file, unreduced.
std::vector<std::uint32_t> read_generating_vector_file(const std::filesystem::path& path);

}  // namespace qmc
}  // namespace maxent
