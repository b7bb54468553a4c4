#include "maxent/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <random>
#include <string>
#include <thread>

#include "maxent/entropy.hpp"
#include "maxent/error.hpp"
#include "maxent/generating_vectors.hpp"

namespace maxent::harness {

namespace {

std::vector<std::uint32_t> vector_from(const std::optional<std::filesystem::path>& file,
                                       std::span<const std::uint32_t> fallback) {
  if (file) return qmc::read_generating_vector_file(*file);
  return {fallback.begin(), fallback.end()};
}

void require_dims(const std::vector<std::uint32_t>& z, std::size_t dim, const char* which) {
  if (z.size() < dim)
    throw InvalidArgument(std::string(which) + " generating vector has " + std::to_string(z.size()) +
                          " components but " + std::to_string(dim) +
                          " are needed; supply a longer one with [vectors] " + which + " = <file>");
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t m, std::uint64_t p, std::uint64_t tag) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ m);
  s = splitmix64(s ^ p);
  return splitmix64(s ^ tag);
}

unsigned worker_count() {
  if (const char* env = std::getenv("MAXENT_THREADS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 4096)
      throw InvalidArgument("MAXENT_THREADS must be a positive integer, got '" + std::string(env) + "'");
    return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::pair<double, double> fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw InvalidArgument("slope fit needs at least two (x, y) pairs");
  const auto n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw NumericalError("slope fit needs positive values");
    sx += std::log2(x[i]);
    sy += std::log2(y[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log2(x[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log2(y[i]) - my);
  }
  if (sxx == 0.0) throw InvalidArgument("slope fit needs distinct x values");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

qmc::PointSet draw_prior_points(const ExperimentConfig& cfg, Sampler sampler, std::uint64_t m,
                                Rng& rng, std::span<const std::uint32_t> generating_vector) {
  const std::size_t k = cfg.model == ModelKind::deconvolution
                            ? static_cast<std::size_t>(cfg.deconvolution.k_dim)
                            : static_cast<std::size_t>(cfg.elliptic.kl_terms);
  const auto rows = static_cast<Eigen::Index>(m);
  const auto cols = static_cast<Eigen::Index>(k);
  qmc::PointSet pts;
  if (sampler == Sampler::mc) {
    pts.points.resize(rows, cols);
    if (cfg.prior == Prior::std_gaussian) {
      std::normal_distribution<double> normal;
      for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) pts.points(i, j) = normal(rng);
      pts.domain = qmc::Domain::real_line;
    } else {
      for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) pts.points(i, j) = uniform01(rng);
    }
  } else {
    const auto variant =
        sampler == Sampler::lattice_tent ? qmc::LatticeVariant::tent : qmc::LatticeVariant::plain;
    if (generating_vector.size() < k)
      throw InvalidArgument("surrogate generating vector has " +
                            std::to_string(generating_vector.size()) + " components but " +
                            std::to_string(k) + " are needed");
    pts = qmc::lattice_points(qmc::LatticeRule::randomized(generating_vector, k, m, rng, variant));
    if (cfg.prior == Prior::std_gaussian) pts = qmc::map_to_gaussian(pts);
  }
  if (cfg.prior == Prior::std_gaussian) pts.points *= cfg.deconvolution.sigma_x;
  return pts;
}

Study::Study(ExperimentConfig cfg)
    : cfg_(std::move(cfg)),
      noise_(gmm::GaussianNoise::isotropic(1, 1.0)),
      surrogate_vector_(vector_from(cfg_.surrogate_vector_file, qmc::surrogate_generating_vector())),
      cubature_vector_(vector_from(cfg_.cubature_vector_file, qmc::cubature_generating_vector())) {
  cfg_.validate();
  if (cfg_.model == ModelKind::deconvolution) {
    model_ = std::make_unique<models::DeconvolutionModel>(cfg_.deconvolution);
    noise_ = gmm::GaussianNoise::isotropic(model_->output_dim(),
                                           cfg_.deconvolution.sigma_eps * cfg_.deconvolution.sigma_eps);
  } else {
    model_ = std::make_unique<models::EllipticModel>(cfg_.elliptic);
    noise_ = gmm::GaussianNoise::isotropic(model_->output_dim(), cfg_.elliptic_noise_variance);
  }
  if (cfg_.sampler != Sampler::mc || cfg_.reference == ReferenceKind::self)
    require_dims(surrogate_vector_, model_->input_dim(), "surrogate");
  if (cfg_.entropy_method == EntropyMethod::mobius)
    require_dims(cubature_vector_, model_->output_dim(), "cubature");
}

gmm::GmmSurrogate Study::surrogate(Sampler sampler, std::uint64_t m, std::uint64_t p) const {
  Rng rng(derive_seed(cfg_.seed, m, p, kSurrogateStream));
  const qmc::PointSet pts = draw_prior_points(cfg_, sampler, m, rng, surrogate_vector_);
  return gmm::build_surrogate(*model_, pts, noise_);
}

double Study::estimate(const gmm::GmmSurrogate& s, std::uint64_t n, std::uint64_t m,
                       std::uint64_t p) const {
  Rng rng(derive_seed(cfg_.seed, m, p, kEntropyStream));
  switch (cfg_.entropy_method) {
    case EntropyMethod::mc: return entropy::mc_entropy(s, n, rng).value;
    case EntropyMethod::mc_cv: return entropy::mc_entropy_control_variate(s, n, rng).value;
    case EntropyMethod::mobius: return entropy::mobius_entropy(s, n, rng, cubature_vector_).value;
  }
  throw InvalidArgument("unknown entropy method");
}

double Study::realization(std::uint64_t m, std::uint64_t p) const {
  return estimate(surrogate(cfg_.sampler, m, p), cfg_.n_for(m), m, p);
}

double Study::reference() const {
  switch (cfg_.reference) {
    case ReferenceKind::analytic: {
      const auto& deconv = dynamic_cast<const models::DeconvolutionModel&>(*model_);
      return entropy::linear_evidence_entropy(deconv.matrix(),
                                              cfg_.deconvolution.sigma_x * cfg_.deconvolution.sigma_x,
                                              noise_);
    }
    case ReferenceKind::frozen: return cfg_.reference_value;
    case ReferenceKind::self:
      return estimate(surrogate(cfg_.reference_sampler, cfg_.reference_m0, 0), cfg_.reference_n0,
                      cfg_.reference_m0, 0);
  }
  throw InvalidArgument("unknown reference kind");
}

ConvergenceReport run_convergence(const ExperimentConfig& cfg) {
  const Study study(cfg);
  const std::size_t r = static_cast<std::size_t>(cfg.realizations);
  const std::size_t tasks = cfg.m_grid.size() * r;
  std::vector<double> results(tasks, 0.0);
  std::vector<std::exception_ptr> errors(tasks);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};

  auto worker = [&] {
    for (std::size_t t = next++; t < tasks && !failed.load(); t = next++) {
      const std::uint64_t m = cfg.m_grid[t / r];
      const std::uint64_t p = t % r + 1;
      try {
        results[t] = study.realization(m, p);
        if (!std::isfinite(results[t])) throw NumericalError("non-finite entropy estimate");
      } catch (...) {
        errors[t] = std::current_exception();
        failed = true;
      }
    }
  };
  const unsigned threads = std::min<unsigned>(worker_count(), static_cast<unsigned>(tasks));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  for (std::size_t t = 0; t < tasks; ++t) {
    if (!errors[t]) continue;
    const std::string where = "realization (M=" + std::to_string(cfg.m_grid[t / r]) +
                              ", p=" + std::to_string(t % r + 1) + "): ";
    try {
      std::rethrow_exception(errors[t]);
    } catch (const NumericalError& e) {
      throw NumericalError(where + e.what());
    } catch (const InvalidArgument& e) {
      throw InvalidArgument(where + e.what());
    } catch (const std::exception& e) {
      throw Error(where + e.what());
    }
  }

  ConvergenceReport report;
  report.reference = study.reference();
  if (!std::isfinite(report.reference)) throw NumericalError("reference value is not finite");
  std::vector<double> ms, rmses;
  for (std::size_t g = 0; g < cfg.m_grid.size(); ++g) {
    std::vector<double> est(results.begin() + static_cast<std::ptrdiff_t>(g * r),
                            results.begin() + static_cast<std::ptrdiff_t>((g + 1) * r));
    double sq = 0.0, mean = 0.0;
    for (double e : est) {
      sq += (report.reference - e) * (report.reference - e);
      mean += e;
    }
    mean /= static_cast<double>(r);
    double var = 0.0;
    for (double e : est) var += (e - mean) * (e - mean);
    const ConvergenceRow row{cfg.m_grid[g], std::sqrt(sq / static_cast<double>(r)),
                             std::sqrt(var / static_cast<double>(r - 1)), mean};
    report.rows.push_back(row);
    report.estimates.push_back(std::move(est));
    ms.push_back(static_cast<double>(row.m));
    rmses.push_back(row.rmse);
  }
  if (ms.size() >= 2) std::tie(report.slope, report.intercept) = fit_loglog(ms, rmses);
  return report;
}

}  // namespace maxent::harness
