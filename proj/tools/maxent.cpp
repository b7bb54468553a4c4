#include <cstdint>
#include <iostream>
#include <algorithm>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "maxent/entropy.hpp"
#include "maxent/error.hpp"
#include "maxent/generating_vectors.hpp"
#include "maxent/harness.hpp"

namespace {

using maxent::harness::ExperimentConfig;
using maxent::harness::Sampler;
using nlohmann::json;

struct RunArgs {
  std::string config;
  std::string experiment;
  std::string out = "results";
};

struct EntropyArgs {
  std::string model = "deconv";
  std::string sampler = "mc";
  std::string method = "mc";
  std::uint64_t m = 64;
  std::uint64_t n = 4096;
  std::uint64_t seed = 1;
  int mesh_n = 64;
  int kl_terms = 100;
};

int cmd_run(const RunArgs& args) {
  if (args.config.empty() == args.experiment.empty())
    throw maxent::InvalidArgument("run: give exactly one of --config or --experiment");
  const ExperimentConfig cfg = args.config.empty() ? maxent::harness::preset(args.experiment)
                                                   : maxent::harness::load_config(args.config);
  const auto report = maxent::harness::run_convergence(cfg);
  maxent::harness::emit_report(report, args.out);
  std::cout << "reference " << report.reference << '\n';
  maxent::harness::write_csv(report, std::cout);
  std::cout << "slope " << report.slope << '\n';
  return 0;
}

int cmd_oracle(const std::string& name, const std::string& dir, bool list) {
  if (list) {
    for (const auto& n : maxent::harness::oracle_names()) std::cout << n << '\n';
    return 0;
  }
  std::cout << maxent::harness::oracle_freeze(name, dir).string() << '\n';
  return 0;
}

int cmd_entropy(const EntropyArgs& a) {
  ExperimentConfig cfg;
  if (a.model == "deconv" || a.model == "deconvolution") {
    cfg = maxent::harness::preset("deconv");
  } else if (a.model == "elliptic") {
    cfg = maxent::harness::preset("elliptic");
    cfg.elliptic.mesh_n = a.mesh_n;
    cfg.elliptic.kl_terms = a.kl_terms;
  } else {
    throw maxent::InvalidArgument("unknown model '" + a.model + "'");
  }
  if (a.sampler == "mc") cfg.sampler = Sampler::mc;
  else if (a.sampler == "lattice") cfg.sampler = Sampler::lattice_plain;
  else if (a.sampler == "tent") cfg.sampler = Sampler::lattice_tent;
  else throw maxent::InvalidArgument("unknown sampler '" + a.sampler + "'");
  if (a.method == "mc") cfg.entropy_method = maxent::harness::EntropyMethod::mc;
  else if (a.method == "mc_cv") cfg.entropy_method = maxent::harness::EntropyMethod::mc_cv;
  else if (a.method == "mobius") cfg.entropy_method = maxent::harness::EntropyMethod::mobius;
  else throw maxent::InvalidArgument("unknown method '" + a.method + "'");
  if (a.m == 0) throw maxent::InvalidArgument("-M must be positive");
  cfg.seed = a.seed;
  cfg.reference = maxent::harness::ReferenceKind::frozen;

  const maxent::harness::Study study(cfg);
  const auto surrogate = study.surrogate(cfg.sampler, a.m, 1);
  maxent::Rng rng(maxent::harness::derive_seed(a.seed, a.m, 1, maxent::harness::kEntropyStream));
  maxent::entropy::EntropyEstimate est;
  switch (cfg.entropy_method) {
    case maxent::harness::EntropyMethod::mc:
      est = maxent::entropy::mc_entropy(surrogate, a.n, rng);
      break;
    case maxent::harness::EntropyMethod::mc_cv:
      est = maxent::entropy::mc_entropy_control_variate(surrogate, a.n, rng);
      break;
    case maxent::harness::EntropyMethod::mobius:
      est = maxent::entropy::mobius_entropy(surrogate, a.n, rng,
                                            maxent::qmc::cubature_generating_vector());
      break;
  }
  json line = {{"model", a.model},
               {"sampler", a.sampler},
               {"method", std::string(maxent::entropy::to_string(est.method))},
               {"M", est.m_count},
               {"N", est.n_count},
               {"seed", a.seed},
               {"value", est.value},
               {"std_error", est.std_error ? json(*est.std_error) : json(nullptr)}};
  std::cout << line.dump() << '\n';
  return 0;
}

int cmd_vectors_check(const std::string& file) {
  const auto z = maxent::qmc::read_generating_vector_file(file);
  if (z.empty()) throw maxent::InvalidArgument("generating vector file has no entries: " + file);
  bool all_odd = true;
  std::uint32_t max = 0;
  for (auto v : z) {
    all_odd = all_odd && (v % 2 == 1);
    max = std::max(max, v);
  }
  json out = {{"file", file}, {"entries", z.size()}, {"first", z.front()},
              {"max", max},   {"all_odd", all_odd}};
  std::cout << out.dump() << '\n';
  if (!all_odd)
    throw maxent::InvalidArgument(
        "even entries are not coprime to power-of-two point counts");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy of Bayesian evidence via Gaussian-mixture surrogates"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "RMSE convergence study; writes convergence.csv/.svg");
  run->add_option("--config", run_args.config, "key = value experiment file");
  run->add_option("--experiment", run_args.experiment,
                  "preset: deconv, deconv_qmc, elliptic, elliptic_desk");
  run->add_option("--out", run_args.out, "output directory")->capture_default_str();

  std::string oracle_name;
  std::string oracle_dir = "fixtures";
  bool oracle_list = false;
  auto* oracle = app.add_subcommand("oracle", "freeze a reference value into <dir>/<name>.txt");
  oracle->add_option("--name", oracle_name, "oracle id");
  oracle->add_option("--dir", oracle_dir, "fixture directory")->capture_default_str();
  oracle->add_flag("--list", oracle_list, "list oracle ids");

  EntropyArgs ent;
  auto* entropy = app.add_subcommand("entropy", "one entropy estimate as a JSON line");
  entropy->add_option("--model", ent.model, "deconv | elliptic")->capture_default_str();
  entropy->add_option("--sampler", ent.sampler, "mc | lattice | tent")->capture_default_str();
  entropy->add_option("--method", ent.method, "mc | mc_cv | mobius")->capture_default_str();
  entropy->add_option("-M", ent.m, "surrogate components")->capture_default_str();
  entropy->add_option("-N", ent.n, "samples or cubature nodes")->capture_default_str();
  entropy->add_option("--seed", ent.seed, "seed")->capture_default_str();
  entropy->add_option("--mesh", ent.mesh_n, "elliptic mesh squares per side")->capture_default_str();
  entropy->add_option("--kl-terms", ent.kl_terms, "elliptic coefficient terms")->capture_default_str();

  std::string vector_file;
  auto* vectors = app.add_subcommand("vectors", "generating vector utilities");
  vectors->require_subcommand(1);
  auto* check = vectors->add_subcommand("check", "validate a generating vector file");
  check->add_option("file", vector_file, "path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(run_args);
    if (oracle->parsed()) {
      if (!oracle_list && oracle_name.empty())
        throw maxent::InvalidArgument("oracle: --name is required");
      return cmd_oracle(oracle_name, oracle_dir, oracle_list);
    }
    if (entropy->parsed()) return cmd_entropy(ent);
    if (check->parsed()) return cmd_vectors_check(vector_file);
  } catch (const maxent::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
