#include "maxent/qmc.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include "maxent/error.hpp"
#include "maxent/normal.hpp"

namespace maxent::qmc {

LatticeRule::LatticeRule(std::vector<std::uint32_t> generating_vector, std::uint64_t count,
                         std::vector<double> shift, LatticeVariant variant)
    : generating_vector_(std::move(generating_vector)),
      count_(count),
      shift_(std::move(shift)),
      variant_(variant) {
  if (count_ == 0) throw InvalidArgument("lattice rule: point count must be positive");
  if (generating_vector_.empty()) throw InvalidArgument("lattice rule: dimension must be positive");
  if (shift_.size() != generating_vector_.size())
    throw InvalidArgument("lattice rule: shift length " + std::to_string(shift_.size()) +
                          " does not match dimension " +
                          std::to_string(generating_vector_.size()));
  for (std::size_t j = 0; j < generating_vector_.size(); ++j) {
    if (generating_vector_[j] >= count_)
      throw InvalidArgument("lattice rule: generating vector entry " + std::to_string(j) + " = " +
                            std::to_string(generating_vector_[j]) + " is not below the count " +
                            std::to_string(count_));
  }
  for (double s : shift_) {
    if (!(s >= 0.0 && s < 1.0)) throw InvalidArgument("lattice rule: shift outside [0,1)");
  }
}

LatticeRule LatticeRule::randomized(std::span<const std::uint32_t> generating_vector,
                                    std::size_t dim, std::uint64_t count, Rng& rng,
                                    LatticeVariant variant) {
  if (count == 0) throw InvalidArgument("lattice rule: point count must be positive");
  if (generating_vector.size() < dim)
    throw InvalidArgument("generating vector has " + std::to_string(generating_vector.size()) +
                          " components, " + std::to_string(dim) + " required");
  std::vector<std::uint32_t> z(dim);
  for (std::size_t j = 0; j < dim; ++j) z[j] = static_cast<std::uint32_t>(generating_vector[j] % count);
  return LatticeRule(std::move(z), count, draw_shift(dim, rng), variant);
}

double LatticeRule::coordinate(std::uint64_t m, std::size_t j) const {
  const auto residue = static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(generating_vector_[j]) * m) % count_);
  double x = static_cast<double>(residue) / static_cast<double>(count_) + shift_[j];
  if (x >= 1.0) x -= 1.0;
  return variant_ == LatticeVariant::tent ? tent(x) : x;
}

PointSet lattice_points(const LatticeRule& rule) {
  PointSet out;
  out.domain = Domain::unit_cube;
  out.points.resize(static_cast<Eigen::Index>(rule.count()), static_cast<Eigen::Index>(rule.dim()));
  for (std::uint64_t m = 1; m <= rule.count(); ++m) {
    for (std::size_t j = 0; j < rule.dim(); ++j)
      out.points(static_cast<Eigen::Index>(m - 1), static_cast<Eigen::Index>(j)) = rule.coordinate(m, j);
  }
  return out;
}

std::vector<double> draw_shift(std::size_t dim, Rng& rng) {
  std::vector<double> shift(dim);
  for (double& s : shift) s = uniform01(rng);
  return shift;
}

PointSet map_to_gaussian(const PointSet& points) {
  if (points.domain != Domain::unit_cube)
    throw InvalidArgument("map_to_gaussian: expected a unit-cube point set");
  PointSet out{points.points, Domain::real_line};
  for (Eigen::Index i = 0; i < out.points.size(); ++i) {
    double& u = out.points.data()[i];
    if (std::isnan(u)) throw InvalidArgument("map_to_gaussian: NaN coordinate");
    u = normal_quantile(std::clamp(u, kUnitClampLo, kUnitClampHi));
  }
  return out;
}

double mobius_map(double u) {
  u = std::clamp(u, kUnitClampLo, kUnitClampHi);
  // -cot(pi u) = tan(pi (u - 1/2)); each branch keeps the tan argument exact
  // near its own singular or zero point.
  if (u < 0.25) return -1.0 / std::tan(std::numbers::pi * u);
  if (u > 0.75) return 1.0 / std::tan(std::numbers::pi * (1.0 - u));
  return std::tan(std::numbers::pi * (u - 0.5));
}

double mobius_log_jacobian(double u) {
  u = std::clamp(u, kUnitClampLo, kUnitClampHi);
  const double s = std::sin(std::numbers::pi * std::min(u, 1.0 - u));
  return std::log(std::numbers::pi) - 2.0 * std::log(s);
}

double mobius_quadrature(const LogIntegrand& f, const LatticeRule& rule) {
  if (rule.variant() != LatticeVariant::plain)
    throw InvalidArgument("mobius_quadrature: the lattice rule must be plain (no tent transform)");
  const std::size_t d = rule.dim();
  std::vector<double> y(d);
  // Neumaier-compensated sum.
  double sum = 0.0;
  double comp = 0.0;
  for (std::uint64_t m = 1; m <= rule.count(); ++m) {
    double log_weight = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double u = rule.coordinate(m, j);
      y[j] = mobius_map(u);
      log_weight += mobius_log_jacobian(u);
    }
    const LogTerm term = f(y);
    if (term.factor == 0.0 || term.log_scale == -std::numeric_limits<double>::infinity()) continue;
    const double v = term.factor * std::exp(log_weight + term.log_scale);
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
  }
  const double result = (sum + comp) / static_cast<double>(rule.count());
  if (!std::isfinite(result))
    throw NumericalError("mobius_quadrature: non-finite accumulation (integrand lacks decay?)");
  return result;
}

double mobius_quadrature(const Integrand& f, const LatticeRule& rule) {
  return mobius_quadrature(
      [&f](std::span<const double> y) {
        const double v = f(y);
        if (v == 0.0) return LogTerm{0.0, 0.0};
        return LogTerm{std::log(std::abs(v)), v > 0.0 ? 1.0 : -1.0};
      },
      rule);
}

std::vector<std::uint32_t> read_generating_vector_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("generating vector file not found: " + path.string());
  std::vector<std::uint32_t> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    const std::string_view token(line.data() + first, last - first + 1);
    std::uint32_t value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
      throw InvalidArgument(path.string() + ":" + std::to_string(lineno) +
                            ": not a nonnegative integer: '" + std::string(token) + "'");
    out.push_back(value);
  }
  return out;
}

std::vector<std::uint32_t> load_generating_vector(const std::filesystem::path& path, int dim,
                                                  std::int64_t max_count) {
  if (dim <= 0) throw InvalidArgument("load_generating_vector: dim must be positive");
  if (max_count <= 0) throw InvalidArgument("load_generating_vector: max_count must be positive");
  auto all = read_generating_vector_file(path);
  if (all.size() < static_cast<std::size_t>(dim))
    throw InvalidArgument(path.string() + ": has " + std::to_string(all.size()) +
                          " components, " + std::to_string(dim) + " required");
  all.resize(static_cast<std::size_t>(dim));
  for (auto& z : all) z = static_cast<std::uint32_t>(z % static_cast<std::uint64_t>(max_count));
  return all;
}

}  // namespace maxent::qmc
