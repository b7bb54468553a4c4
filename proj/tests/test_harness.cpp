#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "maxent/error.hpp"
#include "maxent/generating_vectors.hpp"
#include "maxent/harness.hpp"

using namespace maxent;
using namespace maxent::harness;
namespace fs = std::filesystem;

namespace {

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("maxent_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

ExperimentConfig small_deconv() {
  ExperimentConfig c = preset("deconv");
  c.m_grid = {16, 32, 64};
  c.realizations = 5;
  c.n_value = 1024;
  return c;
}

std::string csv_with_threads(const ExperimentConfig& cfg, const char* threads) {
  setenv("MAXENT_THREADS", threads, 1);
  const auto report = run_convergence(cfg);
  unsetenv("MAXENT_THREADS");
  std::ostringstream out;
  write_csv(report, out);
  return out.str();
}

}  // namespace

TEST(Config, DefaultsMatchDeconvolutionSetup) {
  const auto c = preset("deconv");
  EXPECT_EQ(c.model, ModelKind::deconvolution);
  EXPECT_EQ(c.deconvolution.k_dim, 20);
  EXPECT_EQ(c.deconvolution.gamma, 0.1);
  EXPECT_EQ(c.deconvolution.sigma_x, 10.0);
  EXPECT_EQ(c.deconvolution.sigma_eps, 2.0);
  EXPECT_EQ(c.realizations, 30);
  EXPECT_EQ(c.m_grid.front(), 16u);
  EXPECT_EQ(c.m_grid.back(), 1024u);
  EXPECT_EQ(c.reference, ReferenceKind::analytic);
  EXPECT_EQ(preset("deconv_qmc").sampler, Sampler::lattice_plain);

  const auto e = preset("elliptic");
  EXPECT_EQ(e.elliptic.mesh_n, 64);
  EXPECT_EQ(e.elliptic.kl_terms, 100);
  EXPECT_EQ(e.n_rule, NRule::multiplier);
  EXPECT_EQ(e.n_for(16), 1024u * 16u);
  EXPECT_EQ(e.reference_m0, 1u << 13);
  EXPECT_EQ(e.reference_n0, 1u << 20);

  const auto d = preset("elliptic_desk");
  EXPECT_EQ(d.elliptic.mesh_n, 32);
  EXPECT_EQ(d.realizations, 10);
  EXPECT_EQ(d.m_grid.back(), 512u);
  EXPECT_EQ(d.reference_m0, 1u << 11);
  EXPECT_EQ(d.reference_sampler, Sampler::lattice_tent);
  EXPECT_THROW(preset("nope"), InvalidArgument);
}

TEST(Config, ParsesSectionsArraysAndPowers) {
  const auto c = parse(R"(# comment
experiment = "elliptic_desk"
sampler = "lattice"   # trailing comment
m_grid = [16, 32, 2^6]
realizations = 4
seed = 7

[elliptic]
mesh_n = 16
kl_terms = 50

[entropy]
method = "mc"
n = 2^12

[reference]
kind = "frozen"
value = 1.25
)");
  EXPECT_EQ(c.model, ModelKind::elliptic);
  EXPECT_EQ(c.sampler, Sampler::lattice_plain);
  EXPECT_EQ(c.m_grid, (std::vector<std::uint64_t>{16, 32, 64}));
  EXPECT_EQ(c.realizations, 4);
  EXPECT_EQ(c.seed, 7u);
  EXPECT_EQ(c.elliptic.mesh_n, 16);
  EXPECT_EQ(c.elliptic.kl_terms, 50);
  EXPECT_EQ(c.entropy_method, EntropyMethod::mc);
  EXPECT_EQ(c.n_value, 4096u);
  EXPECT_EQ(c.reference, ReferenceKind::frozen);
  EXPECT_EQ(c.reference_value, 1.25);
}

TEST(Config, ShippedFilesParse) {
  for (const char* name : {"deconv", "deconv_qmc", "elliptic_desk_mc", "elliptic_desk_lattice",
                           "elliptic_desk_tent"}) {
    const fs::path path = fs::path(MAXENT_SOURCE_DIR) / "configs" / (std::string(name) + ".toml");
    EXPECT_NO_THROW(load_config(path)) << path;
  }
  EXPECT_THROW(load_config("/nonexistent/config.toml"), InvalidArgument);
}

TEST(Config, RejectsInvalidInput) {
  EXPECT_THROW(parse("realizations = 1\n"), InvalidArgument);
  EXPECT_THROW(parse("m_grid = [16, 24]\n"), InvalidArgument);
  EXPECT_THROW(parse("m_grid = [32, 16]\n"), InvalidArgument);
  EXPECT_THROW(parse("m_grid = []\n"), InvalidArgument);
  EXPECT_THROW(parse("sampler = \"sobol\"\n"), InvalidArgument);
  EXPECT_THROW(parse("[entropy]\nn = 1\n"), InvalidArgument);
  EXPECT_THROW(parse("experiment = \"elliptic_desk\"\n[reference]\nkind = \"analytic\"\n"),
               InvalidArgument);
  EXPECT_THROW(parse("seed = 3^4\n"), InvalidArgument);
  try {
    parse("seed = 1\nbogus = 2\n");
    FAIL();
  } catch (const InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
}

TEST(Seeds, DocumentedMixingRule) {
  const std::uint64_t s = derive_seed(20240601, 16, 3, kSurrogateStream);
  std::uint64_t ref = splitmix64(20240601);
  ref = splitmix64(ref ^ 16);
  ref = splitmix64(ref ^ 3);
  ref = splitmix64(ref ^ kSurrogateStream);
  EXPECT_EQ(s, ref);
  EXPECT_NE(derive_seed(1, 16, 3, kSurrogateStream), derive_seed(1, 16, 3, kEntropyStream));
  EXPECT_NE(derive_seed(1, 16, 3, 1), derive_seed(1, 16, 4, 1));
  EXPECT_NE(derive_seed(1, 16, 3, 1), derive_seed(1, 32, 3, 1));
}

TEST(Seeds, RealizationsDrawDistinctSurrogates) {
  for (const Sampler sampler : {Sampler::mc, Sampler::lattice_plain, Sampler::lattice_tent}) {
    ExperimentConfig cfg = preset("deconv");
    const Study study(cfg);
    std::set<std::vector<double>> seen;
    for (std::uint64_t p = 1; p <= 30; ++p) {
      const auto s = study.surrogate(sampler, 16, p);
      seen.insert(std::vector<double>(s.centers().data(), s.centers().data() + s.centers().size()));
    }
    EXPECT_EQ(seen.size(), 30u);
  }
}

TEST(Seeds, SurrogateIsReproducible) {
  const Study study(preset("deconv"));
  EXPECT_EQ(study.surrogate(Sampler::mc, 32, 2).centers(), study.surrogate(Sampler::mc, 32, 2).centers());
  EXPECT_EQ(study.realization(32, 2), study.realization(32, 2));
}

TEST(Prior, PointsFollowSamplerAndPrior) {
  ExperimentConfig cfg = preset("deconv");
  Rng rng(1);
  const auto vec = qmc::surrogate_generating_vector();
  const auto mc = draw_prior_points(cfg, Sampler::mc, 8, rng, vec);
  EXPECT_EQ(mc.count(), 8u);
  EXPECT_EQ(mc.dim(), 20u);
  EXPECT_EQ(mc.domain, qmc::Domain::real_line);

  const auto lat = draw_prior_points(cfg, Sampler::lattice_plain, 64, rng, vec);
  // The mapped lattice column mean of a standard normal scaled by sigma_x is
  // small compared with sigma_x.
  EXPECT_LT(std::abs(lat.points.col(0).mean()), 0.5);

  cfg.prior = Prior::uniform_cube;
  cfg.model = ModelKind::elliptic;
  cfg.elliptic.kl_terms = 20;
  const auto tent = draw_prior_points(cfg, Sampler::lattice_tent, 16, rng, vec);
  EXPECT_EQ(tent.domain, qmc::Domain::unit_cube);
  EXPECT_GE(tent.points.minCoeff(), 0.0);
  EXPECT_LE(tent.points.maxCoeff(), 1.0);
  EXPECT_EQ(tent.dim(), 20u);

  EXPECT_THROW(draw_prior_points(cfg, Sampler::lattice_plain, 16, rng, vec.first(5)),
               InvalidArgument);
}

TEST(SlopeFit, RecoversSyntheticRate) {
  for (const double r : {0.5, 1.0, 2.0, 0.37}) {
    std::vector<double> m, y;
    for (int k = 4; k <= 10; ++k) {
      m.push_back(std::ldexp(1.0, k));
      y.push_back(3.7 * std::pow(m.back(), -r));
    }
    const auto [slope, intercept] = fit_loglog(m, y);
    EXPECT_NEAR(slope, -r, 1e-10);
    EXPECT_NEAR(intercept, std::log2(3.7), 1e-10);
  }
  EXPECT_THROW(fit_loglog({1.0}, {1.0}), InvalidArgument);
}

TEST(Report, CsvAndSvg) {
  ConvergenceReport report;
  report.rows = {{16, 0.1, 0.09, 43.7}, {32, 0.05, 0.049, 43.75}, {64, 0.026, 0.025, 43.79}};
  report.slope = -0.98;
  report.intercept = 0.6;
  report.reference = 43.8;
  std::ostringstream csv;
  write_csv(report, csv);
  const std::string text = csv.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
  EXPECT_EQ(text.substr(0, text.find('\n')), "M,rmse,std_dev,mean_estimate");
  std::ostringstream svg;
  write_svg(report, svg);
  EXPECT_NE(svg.str().find("slope -0.98"), std::string::npos);
  EXPECT_NE(svg.str().find("<svg"), std::string::npos);

  const auto dir = scratch_dir("report");
  emit_report(report, dir / "nested");
  EXPECT_EQ(slurp(dir / "nested" / "convergence.csv"), text);
  EXPECT_EQ(slurp(dir / "nested" / "convergence.svg"), svg.str());

  std::ofstream(dir / "plain_file") << "x";
  try {
    emit_report(report, dir / "plain_file" / "out");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("plain_file"), std::string::npos) << e.what();
  }
}

TEST(Oracles, RefreezeReproducesFixturesBitwise) {
  const auto dir = scratch_dir("oracles");
  const auto names = oracle_names();
  EXPECT_GE(names.size(), 3u);
  for (const auto& name : names) {
    const auto path = oracle_freeze(name, dir);
    const fs::path shipped = fs::path(MAXENT_SOURCE_DIR) / "fixtures" / (name + ".txt");
    ASSERT_TRUE(fs::exists(shipped)) << shipped;
    EXPECT_EQ(slurp(path), slurp(shipped)) << name;
  }
  EXPECT_THROW(oracle_values("no_such_oracle"), InvalidArgument);
}

TEST(Oracles, NamedValues) {
  EXPECT_EQ(oracle_values("mobius_gauss_norm").size(), 1u);
  EXPECT_NEAR(oracle_values("mobius_gauss_norm")[0], 1.0, 1e-12);
  EXPECT_EQ(oracle_values("elliptic_ref_n256").size(), 3u);
}

TEST(Convergence, ReportShapeAndStatistics) {
  const auto cfg = small_deconv();
  const auto report = run_convergence(cfg);
  ASSERT_EQ(report.rows.size(), 3u);
  ASSERT_EQ(report.estimates.size(), 3u);
  for (std::size_t g = 0; g < 3; ++g) {
    const auto& est = report.estimates[g];
    ASSERT_EQ(est.size(), 5u);
    double mean = 0.0, ms = 0.0, var = 0.0;
    for (double v : est) mean += v / 5.0;
    for (double v : est) {
      ms += (v - report.reference) * (v - report.reference) / 5.0;
      var += (v - mean) * (v - mean) / 4.0;
    }
    EXPECT_EQ(report.rows[g].m, cfg.m_grid[g]);
    EXPECT_NEAR(report.rows[g].rmse, std::sqrt(ms), 1e-12);
    EXPECT_NEAR(report.rows[g].std_dev, std::sqrt(var), 1e-12);
    EXPECT_NEAR(report.rows[g].mean_estimate, mean, 1e-12);
  }
  EXPECT_NEAR(report.reference, read_fixture(fs::path(MAXENT_SOURCE_DIR) / "fixtures" /
                                             "jk_deconv_default.txt")[0],
              1e-9);
}

TEST(Convergence, DeterministicAcrossThreadCounts) {
  auto cfg = small_deconv();
  cfg.sampler = Sampler::lattice_plain;
  const std::string one = csv_with_threads(cfg, "1");
  EXPECT_EQ(one, csv_with_threads(cfg, "3"));
  EXPECT_EQ(one, csv_with_threads(cfg, "8"));
}

TEST(Convergence, RejectsMissingVectorFile) {
  auto cfg = small_deconv();
  cfg.sampler = Sampler::lattice_plain;
  cfg.surrogate_vector_file = "/nonexistent/vector.txt";
  EXPECT_THROW(run_convergence(cfg), InvalidArgument);
}

TEST(Convergence, WorkerCountHonoursEnvironment) {
  setenv("MAXENT_THREADS", "3", 1);
  EXPECT_EQ(worker_count(), 3u);
  unsetenv("MAXENT_THREADS");
  EXPECT_GE(worker_count(), 1u);
}

TEST(Convergence, DoublingTheEntropySampleBarelyMovesTheRmse) {
  ExperimentConfig cfg = preset("deconv");
  const auto base = run_convergence(cfg);
  cfg.n_value *= 2;
  const auto doubled = run_convergence(cfg);
  for (std::size_t g = 0; g < base.rows.size(); ++g)
    EXPECT_NEAR(doubled.rows[g].rmse / base.rows[g].rmse, 1.0, 0.05) << "M " << base.rows[g].m;
}
