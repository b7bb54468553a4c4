// Acceptance run: one PASS/FAIL line per criterion. Pass criterion numbers as
// arguments to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "maxent/divergences.hpp"
#include "maxent/entropy.hpp"
#include "maxent/fem.hpp"
#include "maxent/generating_vectors.hpp"
#include "maxent/harness.hpp"
#include "oracles.hpp"

using namespace maxent;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  if (!ok) ++failures;
  std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << id << ": " << what << std::endl;
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

harness::ConvergenceReport run_config(const std::string& name) {
  return harness::run_convergence(
      harness::load_config(fs::path(MAXENT_SOURCE_DIR) / "configs" / (name + ".toml")));
}

void criterion_rate(int id, const std::string& config, double lo, double hi) {
  const auto t0 = Clock::now();
  const auto r = run_config(config);
  const double secs = seconds_since(t0);
  report(id, r.slope >= lo && r.slope <= hi,
         config + " slope " + fmt(r.slope) + " in [" + fmt(lo) + ", " + fmt(hi) + "] (" +
             fmt(secs, 3) + " s)");
}

void criterion_elliptic() {
  const auto t0 = Clock::now();
  const auto mc = run_config("elliptic_desk_mc");
  const auto lat = run_config("elliptic_desk_lattice");
  const auto tent = run_config("elliptic_desk_tent");
  const double secs = seconds_since(t0);
  const bool ok_mc = mc.slope >= -0.7 && mc.slope <= -0.3;
  const bool ok_lat = lat.slope >= -1.3 && lat.slope <= -0.7;
  const bool ok_tent = tent.slope <= -1.5;
  const bool ok_time = secs <= 1800.0;
  report(3, ok_mc && ok_lat && ok_tent && ok_time,
         "elliptic desk slopes mc " + fmt(mc.slope) + (ok_mc ? "" : " (out of [-0.7, -0.3])") +
             ", lattice " + fmt(lat.slope) + (ok_lat ? "" : " (out of [-1.3, -0.7])") + ", tent " +
             fmt(tent.slope) + (ok_tent ? "" : " (above -1.5)") + ", " + fmt(secs, 4) + " s" +
             (ok_time ? "" : " (over 1800 s)"));
}

gmm::GmmSurrogate fixture_surrogate() {
  Rng rng(2718);
  std::normal_distribution<double> n;
  RowMatrix c(8, 2);
  for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = n(rng);
  Eigen::Matrix2d cov;
  cov << 0.5, 0.1, 0.1, 0.4;
  return gmm::GmmSurrogate(c, gmm::GaussianNoise(cov));
}

double fixture_target(const gmm::GmmSurrogate& s) {
  Rng rng(9);
  return entropy::mobius_entropy(s, 1u << 16, rng, qmc::cubature_generating_vector()).value;
}

void criterion_unbiased() {
  const auto s = fixture_surrogate();
  const double target = fixture_target(s);
  double sum = 0.0, var_sum = 0.0;
  const int runs = 200;
  for (int r = 0; r < runs; ++r) {
    Rng rng(harness::derive_seed(4, 8, static_cast<std::uint64_t>(r), 7));
    const auto est = entropy::mc_entropy(s, 1024, rng);
    sum += est.value;
    var_sum += *est.std_error * *est.std_error;
  }
  const double pooled = std::sqrt(var_sum) / runs;
  const double gap = std::abs(sum / runs - target);
  report(4, gap <= 3.0 * pooled,
         "mean of 200 mc runs differs from cubature by " + fmt(gap / pooled, 3) +
             " pooled SE (limit 3)");
}

void criterion_bias_variance() {
  const auto s = fixture_surrogate();
  const double target = fixture_target(s);
  std::vector<double> values;
  for (int r = 0; r < 500; ++r) {
    Rng rng(harness::derive_seed(5, 8, static_cast<std::uint64_t>(r), 7));
    values.push_back(entropy::mc_entropy(s, 1024, rng).value);
  }
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / 500.0;
  double mse = 0.0, var = 0.0;
  for (double v : values) {
    mse += (v - target) * (v - target);
    var += (v - mean) * (v - mean);
  }
  mse /= 500.0;
  var /= 499.0;
  const double bias = mean - target;
  const double rel = std::abs(mse - (bias * bias + var)) / mse;
  report(5, rel <= 0.1, "MSE vs bias^2 + variance relative gap " + fmt(rel, 3) + " (limit 0.1)");
}

Eigen::MatrixXd random_spd(int d, Rng& rng) {
  std::normal_distribution<double> n;
  Eigen::MatrixXd b(d, d);
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = n(rng);
  return b * b.transpose() / d + 0.1 * Eigen::MatrixXd::Identity(d, d);
}

void criterion_inequalities() {
  Rng rng(6);
  std::normal_distribution<double> n;
  int violations = 0, finite = 0;
  for (int i = 0; i < 1000; ++i) {
    const int d = 1 + i % 3;
    divergences::GaussianPair p;
    p.mean1 = Eigen::VectorXd(d);
    p.mean2 = Eigen::VectorXd(d);
    for (int j = 0; j < d; ++j) {
      p.mean1(j) = n(rng);
      p.mean2(j) = n(rng);
    }
    p.cov1 = random_spd(d, rng);
    p.cov2 = random_spd(d, rng);
    const auto div = divergences::gaussian_divergences(p);
    const auto b = divergences::check_entropy_bounds(p);
    if (std::isfinite(div.chi2)) {
      ++finite;
      if (div.kl > div.chi2) ++violations;
    }
    if (b.lhs > b.chi2_bound) ++violations;
    if (b.lhs > b.kl_bound) ++violations;
  }
  report(6, violations == 0,
         std::to_string(violations) + " violations over 1000 pairs (" + std::to_string(finite) +
             " with finite chi2)");
}

// -int p log p for a zero-mean normal with covariance `cov`, d <= 2, by
// nested adaptive Simpson over +-12 standard deviations.
double brute_entropy(const Eigen::MatrixXd& cov) {
  const double tol = 1e-11;
  if (cov.rows() == 1) {
    const double v = cov(0, 0), sd = std::sqrt(v);
    const auto f = [v](double x) {
      const double lp = -0.5 * x * x / v - 0.5 * std::log(2.0 * std::numbers::pi * v);
      return -std::exp(lp) * lp;
    };
    return oracle::adaptive_simpson(f, -12.0 * sd, 12.0 * sd, tol);
  }
  const Eigen::Matrix2d c = cov;
  const Eigen::Matrix2d prec = c.inverse();
  const double log_norm = -std::log(2.0 * std::numbers::pi) - 0.5 * std::log(c.determinant());
  const double sx = std::sqrt(c(0, 0)), sy = std::sqrt(c(1, 1));
  const auto inner = [&](double x) {
    const auto g = [&](double y) {
      const double q = prec(0, 0) * x * x + 2.0 * prec(0, 1) * x * y + prec(1, 1) * y * y;
      const double lp = log_norm - 0.5 * q;
      return -std::exp(lp) * lp;
    };
    return oracle::adaptive_simpson(g, -12.0 * sy, 12.0 * sy, tol);
  };
  return oracle::adaptive_simpson(inner, -12.0 * sx, 12.0 * sx, tol);
}

void criterion_analytic_entropy() {
  Rng rng(7);
  std::normal_distribution<double> n;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const int d = 1 + i % 2;
    if (i < 10) {
      const Eigen::MatrixXd cov = random_spd(d, rng);
      worst = std::max(worst, std::abs(entropy::gaussian_entropy(cov) - brute_entropy(cov)));
    } else {
      const int k = 1 + i % 3;
      Eigen::MatrixXd a(d, k);
      for (Eigen::Index j = 0; j < a.size(); ++j) a.data()[j] = n(rng);
      const double prior_var = 0.5 + uniform01(rng);
      const gmm::GaussianNoise noise(random_spd(d, rng));
      const Eigen::MatrixXd cov = prior_var * a * a.transpose() + noise.covariance();
      worst = std::max(worst, std::abs(entropy::linear_evidence_entropy(a, prior_var, noise) -
                                       brute_entropy(cov)));
    }
  }
  report(7, worst <= 1e-6, "20 closed-form entropies vs quadrature, worst gap " + fmt(worst, 3));
}

double manufactured_error(int n) {
  const auto u_exact = [](fem::Point p) {
    return std::sin(std::numbers::pi * p.x) * std::sin(std::numbers::pi * p.y);
  };
  const auto mesh = fem::build_mesh(n);
  const auto u = fem::solve_poisson(
      mesh, [](fem::Point) { return 1.0; },
      [&](fem::Point p) { return 2.0 * std::numbers::pi * std::numbers::pi * u_exact(p); });
  double err = 0.0;
  for (std::size_t i = 0; i < mesh.node_count(); ++i)
    err = std::max(err, std::abs(u(static_cast<Eigen::Index>(i)) - u_exact(mesh.nodes[i])));
  return err;
}

void criterion_fem() {
  std::vector<double> h, err;
  for (int n : {8, 16, 32, 64}) {
    h.push_back(1.0 / n);
    err.push_back(manufactured_error(n));
  }
  const double slope = harness::fit_loglog(h, err).first;
  const auto mesh = fem::build_mesh(64);
  const bool counts = mesh.triangle_count() == 8192 && mesh.node_count() == 4225;
  report(8, slope >= 1.8 && slope <= 2.2 && counts,
         "manufactured-solution slope " + fmt(slope) + " in [1.8, 2.2], n=64 mesh " +
             std::to_string(mesh.triangle_count()) + " triangles " +
             std::to_string(mesh.node_count()) + " nodes");
}

int run_cli(const std::string& threads, const fs::path& out) {
  const std::string cmd = "MAXENT_THREADS=" + threads + " " + MAXENT_CLI + " run --config " +
                          MAXENT_SOURCE_DIR + "/configs/deconv.toml --out " + out.string() +
                          " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void criterion_determinism() {
  const auto dir = fs::temp_directory_path() / "maxent_acceptance_determinism";
  fs::remove_all(dir);
  bool ok = true;
  std::string first;
  for (const char* threads : {"1", "3"}) {
    const fs::path out = dir / (std::string("threads") + threads);
    if (run_cli(threads, out) != 0) {
      ok = false;
      break;
    }
    const std::string csv = slurp(out / "convergence.csv");
    if (first.empty()) first = csv;
    ok = ok && !csv.empty() && csv == first;
  }
  report(9, ok, "deconv run CSV byte-identical at MAXENT_THREADS=1 and 3");
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
  const auto wanted = [&](int id) { return only.empty() || only.count(id) > 0; };

  const std::pair<int, void (*)()> criteria[] = {
      {1, [] { criterion_rate(1, "deconv", -0.65, -0.35); }},
      {2, [] { criterion_rate(2, "deconv_qmc", -1.25, -0.75); }},
      {3, criterion_elliptic},
      {4, criterion_unbiased},
      {5, criterion_bias_variance},
      {6, criterion_inequalities},
      {7, criterion_analytic_entropy},
      {8, criterion_fem},
      {9, criterion_determinism},
  };
  for (const auto& [id, run] : criteria) {
    if (!wanted(id)) continue;
    try {
      run();
    } catch (const std::exception& e) {
      report(id, false, std::string("threw: ") + e.what());
    }
  }
  std::cout << failures << " criteria failed" << std::endl;
  return failures == 0 ? 0 : 1;
}
