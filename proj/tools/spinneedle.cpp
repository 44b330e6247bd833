// spinneedle: rate exponents, synthetic data, fits and convergence benchmarks.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "spinneedlets/errors.hpp"
#include "spinneedlets/experiment.hpp"
#include "spinneedlets/text_io.hpp"

namespace fs = std::filesystem;
using namespace spinneedlets;

namespace {

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot open output file " + path.string());
  return out;
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open input file " + path.string());
  return in;
}

void print_fit(const RateFit& fit) {
  std::cout << "slope=" << format_double(fit.slope) << '\n';
  std::cout << "intercept=" << format_double(fit.intercept) << '\n';
  std::cout << "n,mean_loss_p,residual\n";
  for (std::size_t i = 0; i < fit.points.size(); ++i) {
    std::cout << fit.points[i].n << ',' << format_double(fit.points[i].mean_loss) << ','
              << format_double(fit.residuals[i]) << '\n';
  }
}

int run_alpha(double r, double pi, double p) {
  const Alpha alpha = alpha_theoretical(r, pi, p);
  std::cout << "alpha=" << format_double(alpha.alpha) << '\n';
  std::cout << "zone=" << to_string(alpha.zone) << '\n';
  return 0;
}

int run_synth(const fs::path& config_path, const fs::path& out_path) {
  const ExperimentConfig config = load_config(config_path);
  const NeedletFrame frame = experiment_frame(config);
  const BesovTestSection truth = experiment_truth(config, frame, 0);
  const std::size_t n = config.n_grid.front();
  const std::uint64_t seed = cell_seed(config.seed, n, 0);
  const Dataset data = simulate_dataset(truth, n, config.noise, seed,
                                        "besov-seed-" + std::to_string(truth.seed));
  auto out = open_output(out_path);
  write_dataset(out, data);
  fs::path truth_path = out_path;
  truth_path += ".truth.csv";
  auto truth_out = open_output(truth_path);
  write_section(truth_out, truth);
  std::cout << "wrote " << out_path.string() << " (n=" << n << ") and " << truth_path.string()
            << '\n';
  return 0;
}

int run_fit(const fs::path& data_path, const fs::path& config_path, const fs::path& out_path) {
  const ExperimentConfig config = load_config(config_path);
  auto in = open_input(data_path);
  Dataset data;
  try {
    data = read_dataset(in);
  } catch (const IoError& e) {
    throw IoError(data_path.string() + ": " + e.what());
  }
  if (data.spin != config.spin) throw ConfigError("dataset spin differs from config spin");
  const int cutoff = cutoff_level(config.bandwidth, data.size());
  const NeedletFrame frame =
      build_frame(config.bandwidth, config.spin, config.flavor, cutoff, config.smoothness);
  double sup_bound = 0.0;
  if (config.sup_bound) {
    sup_bound = *config.sup_bound;
  } else {
    // The configured truth is deterministic, so "auto" can be resolved here too.
    const NeedletFrame truth_frame = experiment_frame(config);
    sup_bound = sup_norm(experiment_truth(config, truth_frame, 0).coeffs);
  }
  EstimatorConfig estimator;
  estimator.bandwidth = config.bandwidth;
  estimator.spin = config.spin;
  estimator.flavor = config.flavor;
  estimator.kappa = experiment_kappa(config, sup_bound);
  estimator.n = data.size();
  estimator.sup_bound = sup_bound;
  const EstimateResult result = fit(data, estimator, frame);
  auto out = open_output(out_path);
  write_estimate(out, result);
  std::cout << "J_n=" << result.cutoff << " kappa=" << format_double(estimator.kappa)
            << " kept=" << result.kept_total() << '\n';
  return 0;
}

int run_bench(const fs::path& config_path, const fs::path& out_dir) {
  const ExperimentConfig config = load_config(config_path);
  const RateResult result = run_convergence(config);
  fs::create_directories(out_dir);
  const fs::path csv_path = out_dir / "convergence.csv";
  {
    auto out = open_output(csv_path);
    write_convergence_csv(out, result.rows);
  }
  std::cout << "csv=" << csv_path.string() << '\n';
  std::cout << "kappa=" << format_double(result.kappa) << '\n';
  std::cout << "sup_bound=" << format_double(result.sup_bound) << '\n';
  std::cout << "alpha=" << format_double(result.theory.alpha) << '\n';
  std::cout << "zone=" << to_string(result.theory.zone) << '\n';
  print_fit(result.fit);
  return 0;
}

int run_rate(const fs::path& csv_path) {
  auto in = open_input(csv_path);
  std::vector<ConvergenceRow> rows;
  try {
    rows = read_convergence_csv(in);
  } catch (const IoError& e) {
    throw IoError(csv_path.string() + ": " + e.what());
  }
  print_fit(estimate_rate(std::span<const ConvergenceRow>(rows)));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin needlet regression: rate exponents, synthetic data and benchmarks"};
  app.require_subcommand(1);

  double r = 0.0;
  double pi = 0.0;
  double p = 0.0;
  auto* alpha = app.add_subcommand("alpha", "theoretical rate exponent alpha(r, pi, p)");
  // Plain doubles so that "inf" is accepted for pi and p.
  alpha->add_option("--r", r, "Besov smoothness")->required();
  alpha->add_option("--pi", pi, "Besov integrability (may be inf)")->required();
  alpha->add_option("--p", p, "loss index (may be inf)")->required();

  std::string config_path;
  std::string out_path;
  auto* synth = app.add_subcommand("synth", "sample a truth and a dataset from a config");
  synth->add_option("--config", config_path, "experiment config file")->required();
  synth->add_option("--out", out_path, "dataset output file")->required();

  std::string data_path;
  auto* fit_cmd = app.add_subcommand("fit", "threshold estimate from a dataset");
  fit_cmd->add_option("--data", data_path, "dataset file")->required();
  fit_cmd->add_option("--config", config_path, "experiment config file")->required();
  fit_cmd->add_option("--out", out_path, "estimate output file")->required();

  auto* bench = app.add_subcommand("bench", "run the convergence experiment and write CSV");
  bench->add_option("--config", config_path, "experiment config file")->required();
  bench->add_option("--out", out_path, "output directory")->required();

  std::string csv_path;
  auto* rate = app.add_subcommand("rate", "fit the empirical rate slope of a convergence CSV");
  rate->add_option("--csv", csv_path, "convergence CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*alpha) return run_alpha(r, pi, p);
    if (*synth) return run_synth(config_path, out_path);
    if (*fit_cmd) return run_fit(data_path, config_path, out_path);
    if (*bench) return run_bench(config_path, out_path);
    if (*rate) return run_rate(csv_path);
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
