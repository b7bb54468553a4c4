#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "maxent/gmm.hpp"
#include "maxent/models.hpp"
#include "maxent/qmc.hpp"
#include "maxent/random.hpp"

namespace maxent::harness {

enum class ModelKind { deconvolution, elliptic };
enum class Prior { std_gaussian, uniform_cube };
enum class Sampler { mc, lattice_plain, lattice_tent };
enum class EntropyMethod { mc, mc_cv, mobius };
enum class NRule { fixed, multiplier };
enum class ReferenceKind { analytic, frozen, self };

struct ExperimentConfig {
  std::string experiment = "deconv";
  ModelKind model = ModelKind::deconvolution;
  models::DeconvolutionParams deconvolution;
  models::EllipticParams elliptic;
  double elliptic_noise_variance = 0.1;

  Prior prior = Prior::std_gaussian;
  Sampler sampler = Sampler::mc;

  EntropyMethod entropy_method = EntropyMethod::mc_cv;
  NRule n_rule = NRule::fixed;
  std::uint64_t n_value = 1u << 14;

  std::vector<std::uint64_t> m_grid{16, 32, 64, 128, 256, 512, 1024};
  int realizations = 30;
  std::uint64_t seed = 20240601;

  ReferenceKind reference = ReferenceKind::analytic;
  double reference_value = 0.0;  // for frozen
  std::uint64_t reference_m0 = 1u << 13;
  std::uint64_t reference_n0 = 1u << 20;
  Sampler reference_sampler = Sampler::lattice_tent;

  std::optional<std::filesystem::path> surrogate_vector_file;
  std::optional<std::filesystem::path> cubature_vector_file;

  /// N for a given M under the configured rule.
  std::uint64_t n_for(std::uint64_t m) const;

  /// Throws InvalidArgument naming the offending field.
  void validate() const;
};

/// Paper-default configurations: "deconv", "deconv_qmc", "elliptic",
/// "elliptic_desk" (n=32, R=10, M up to 2^9, M0=2^11, fixed N=2^19 so the
/// cubature error stays far below the M-dependent error at every M).
ExperimentConfig preset(const std::string& name);

/// TOML-style key/value text: `key = value` lines, `[section]` headers that
/// prefix following keys with `section.`, `#` comments, quoted strings and
/// `[a, b, ...]` integer arrays. An `experiment = "<preset>"` line selects the
/// preset the remaining keys override.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Child seed for realization p at grid value M on a named stream:
///
///   s = splitmix64(seed)
///   s = splitmix64(s ^ M)
///   s = splitmix64(s ^ p)
///   s = splitmix64(s ^ tag)
///
/// with splitmix64 the finalizer in random.hpp. Realizations use p = 1..R;
/// the self reference uses p = 0.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t m, std::uint64_t p, std::uint64_t tag);

inline constexpr std::uint64_t kSurrogateStream = 1;
inline constexpr std::uint64_t kEntropyStream = 2;

/// Worker count: MAXENT_THREADS if set (positive integer), else the hardware
/// concurrency.
unsigned worker_count();

struct ConvergenceRow {
  std::uint64_t m;
  double rmse;
  double std_dev;
  double mean_estimate;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  std::vector<std::vector<double>> estimates;  // [grid index][realization]
  double slope = 0.0;
  double intercept = 0.0;
  double reference = 0.0;
};

/// Least-squares line through (log2 x, log2 y): returns {slope, intercept}.
std::pair<double, double> fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

/// Prior points for one realization, drawn with `rng` according to sampler
/// and prior (standard Gaussian priors are scaled by sigma_x). Lattice
/// samplers use the first K entries of `generating_vector`.
qmc::PointSet draw_prior_points(const ExperimentConfig& cfg, Sampler sampler, std::uint64_t m,
                                Rng& rng, std::span<const std::uint32_t> generating_vector);

/// Everything a study shares between realizations: the model, its noise and
/// the generating vectors. Immutable after construction.
class Study {
 public:
  explicit Study(ExperimentConfig cfg);

  const ExperimentConfig& config() const { return cfg_; }
  const models::ForwardModel& model() const { return *model_; }
  const gmm::GaussianNoise& noise() const { return noise_; }

  /// Surrogate for grid value m and realization p, built with `sampler`.
  gmm::GmmSurrogate surrogate(Sampler sampler, std::uint64_t m, std::uint64_t p) const;

  /// Entropy estimate of `s` with n samples or nodes on the realization's stream.
  double estimate(const gmm::GmmSurrogate& s, std::uint64_t n, std::uint64_t m,
                  std::uint64_t p) const;

  /// One estimate of Ent(pi_M) for grid value m and realization p.
  double realization(std::uint64_t m, std::uint64_t p) const;

  /// The reference value the configuration asks for.
  double reference() const;

 private:
  ExperimentConfig cfg_;
  std::unique_ptr<models::ForwardModel> model_;
  gmm::GaussianNoise noise_;
  std::vector<std::uint32_t> surrogate_vector_;
  std::vector<std::uint32_t> cubature_vector_;
};

/// Runs the RMSE study. Realizations are distributed over worker_count()
/// threads and collected by (M, p) index, so the report does not depend on
/// the thread count. A failing realization aborts with its coordinates.
ConvergenceReport run_convergence(const ExperimentConfig& cfg);

/// Writes convergence.csv and convergence.svg into out_dir (created if missing).
void emit_report(const ConvergenceReport& report, const std::filesystem::path& out_dir);
void write_csv(const ConvergenceReport& report, std::ostream& out);
void write_svg(const ConvergenceReport& report, std::ostream& out);

/// Registered oracle names.
std::vector<std::string> oracle_names();

/// Writes <dir>/<name>.txt: comment lines with the oracle's configuration,
/// then one value per line with 12 significant digits. Returns the path.
std::filesystem::path oracle_freeze(const std::string& name, const std::filesystem::path& dir);

/// The values oracle_freeze would write.
std::vector<double> oracle_values(const std::string& name);

/// Parses the values of a frozen fixture file.
std::vector<double> read_fixture(const std::filesystem::path& path);

}  // namespace maxent::harness
