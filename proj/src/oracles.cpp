#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <string>

#include <Eigen/LU>

#include "maxent/divergences.hpp"
#include "maxent/entropy.hpp"
#include "maxent/error.hpp"
#include "maxent/generating_vectors.hpp"
#include "maxent/harness.hpp"

namespace maxent::harness {

namespace {

struct Oracle {
  std::vector<std::string> config;  // written as comment lines
  std::function<std::vector<double>()> compute;
};

constexpr std::uint64_t kMobiusOracleSeed = 1;
constexpr std::uint64_t kMobiusOracleNodes = 1u << 12;
constexpr std::uint64_t kDeltaOracleSeed = 1;
constexpr int kDeltaOraclePoints = 64;

std::vector<double> jk_deconv_default() {
  const models::DeconvolutionModel model;
  const auto& p = model.params();
  const auto noise = gmm::GaussianNoise::isotropic(model.output_dim(), p.sigma_eps * p.sigma_eps);
  const double prior_var = p.sigma_x * p.sigma_x;
  const double value = entropy::linear_evidence_entropy(model.matrix(), prior_var, noise);

  const Eigen::MatrixXd cov =
      prior_var * model.matrix() * model.matrix().transpose() + noise.covariance();
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(cov);
  double log_abs_det = 0.0;
  for (Eigen::Index i = 0; i < cov.rows(); ++i) log_abs_det += std::log(std::abs(lu.matrixLU()(i, i)));
  const double d = static_cast<double>(cov.rows());
  const double via_lu = 0.5 * d * (1.0 + std::log(2.0 * std::numbers::pi)) + 0.5 * log_abs_det;
  if (std::abs(value - via_lu) > 1e-8)
    throw NumericalError("jk_deconv_default: Cholesky and LU log-determinants disagree");
  return {value};
}

std::vector<double> deconv_row_sums() {
  const models::DeconvolutionModel model;
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(model.params().k_dim);
  const Eigen::VectorXd y = model({ones.data(), static_cast<std::size_t>(ones.size())});
  return {y.begin(), y.end()};
}

std::vector<double> elliptic_ref_n256() {
  models::EllipticParams params;
  params.mesh_n = 256;
  const models::EllipticModel model(params);
  const std::vector<double> x(model.input_dim(), 0.5);
  const Eigen::VectorXd y = model({x.data(), x.size()});
  return {y.begin(), y.end()};
}

std::vector<double> mobius_gauss_norm() {
  Rng rng(kMobiusOracleSeed);
  const auto rule = qmc::LatticeRule::randomized(qmc::cubature_generating_vector(), 1,
                                                 kMobiusOracleNodes, rng);
  const double q = qmc::mobius_quadrature(
      [](std::span<const double> y) {
        return std::exp(-0.5 * y[0] * y[0]) / std::sqrt(2.0 * std::numbers::pi);
      },
      rule);
  return {q};
}

std::vector<double> delta_k_elliptic_mesh() {
  Rng rng(kDeltaOracleSeed);
  qmc::PointSet pts;
  pts.points.resize(kDeltaOraclePoints, 100);
  for (Eigen::Index i = 0; i < pts.points.size(); ++i) pts.points.data()[i] = uniform01(rng);
  const auto model_at = [](int n) {
    models::EllipticParams params;
    params.mesh_n = n;
    return models::EllipticModel(params);
  };
  const auto fine = model_at(64);
  const auto noise = gmm::GaussianNoise::isotropic(fine.output_dim(), 0.1);
  return {divergences::delta_k(fine, model_at(16), pts, noise),
          divergences::delta_k(fine, model_at(32), pts, noise)};
}

const std::map<std::string, Oracle>& registry() {
  static const std::map<std::string, Oracle> table = {
      {"jk_deconv_default",
       {{"evidence entropy of the linear deconvolution model",
         "K=20 gamma=0.1 sigma_x=10 sigma_eps=2", "Cholesky log-det, LU cross-check 1e-8"},
        jk_deconv_default}},
      {"deconv_row_sums",
       {{"deconvolution forward map at x = 1 (row sums of A)", "K=20 gamma=0.1"},
        deconv_row_sums}},
      {"elliptic_ref_n256",
       {{"elliptic observations u(0.25,0.25) u(0.25,0.5) u(0.75,0.5)",
         "mesh n=256 K=100 x_j=1/2 source 10*s1"},
        elliptic_ref_n256}},
      {"delta_k_elliptic_mesh",
       {{"delta_K of the elliptic model against mesh n=64, rows: n=16, n=32",
         "64 uniform prior points in [0,1]^100 seed=" + std::to_string(kDeltaOracleSeed),
         "noise variance 0.1"},
        delta_k_elliptic_mesh}},
      {"mobius_gauss_norm",
       {{"Moebius lattice integral of the standard normal density on R",
         "N=4096 generating vector z_1=1 seed=" + std::to_string(kMobiusOracleSeed)},
        mobius_gauss_norm}},
  };
  return table;
}

const Oracle& find(const std::string& name) {
  const auto& table = registry();
  const auto it = table.find(name);
  if (it == table.end()) {
    std::string known;
    for (const auto& [k, v] : table) known += (known.empty() ? "" : ", ") + k;
    throw InvalidArgument("unknown oracle '" + name + "' (known: " + known + ")");
  }
  return it->second;
}

}  // namespace

std::vector<std::string> oracle_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : registry()) names.push_back(k);
  return names;
}

std::vector<double> oracle_values(const std::string& name) { return find(name).compute(); }

std::filesystem::path oracle_freeze(const std::string& name, const std::filesystem::path& dir) {
  const Oracle& oracle = find(name);
  const std::vector<double> values = oracle.compute();
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create fixture directory " + dir.string() + ": " + ec.message());
  const auto path = dir / (name + ".txt");
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "# " << name << '\n';
  for (const auto& line : oracle.config) out << "# " << line << '\n';
  for (double v : values) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%#.12g", v);
    out << buf << '\n';
  }
  out.flush();
  if (!out) throw Error("write failed: " + path.string());
  return path;
}

std::vector<double> read_fixture(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("fixture not found: " + path.string());
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    values.push_back(std::stod(line));
  }
  return values;
}

}  // namespace maxent::harness
