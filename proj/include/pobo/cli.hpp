//
// Copyright 2026 The pobo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// Command-line front end. Subcommands: transform (release a dataset), run
// (one outsourced optimization session), bench (multi-run regret
// comparison), sweep (projection/privacy grid), check (distortion checks on
// a released pair), constants (derived guarantee constants).

#ifndef POBO_CLI_HPP_
#define POBO_CLI_HPP_

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "pobo/analysis.hpp"
#include "pobo/bench.hpp"
#include "pobo/curator.hpp"
#include "pobo/errors.hpp"
#include "pobo/gp.hpp"
#include "pobo/io.hpp"
#include "pobo/modeler.hpp"
#include "pobo/random.hpp"
#include "pobo/serialize.hpp"

namespace pobo::cli {

inline constexpr const char* kEpsilonHelp =
    "privacy epsilon as a raw positive real (the exponent notation exp(1.1) "
    "means passing 3.004)";

// Master seed precedence: explicit flag, then the PO_BO_SEED environment
// variable, then 12345.
inline std::uint64_t resolve_master_seed(std::optional<std::uint64_t> flag) {
  if (flag.has_value()) {
    return *flag;
  }
  if (const char* env = std::getenv("PO_BO_SEED")) {
    const std::string_view text(env);
    std::uint64_t value = 0;
    const auto [end, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() ||
        end != text.data() + text.size()) {
      throw InputError(
          "environment variable PO_BO_SEED is not an unsigned integer: '" +
          std::string(text) + "'");
    }
    return value;
  }
  return 12345;
}

namespace detail {

struct HyperFlags {
  double signal_variance = 1.0;
  double length_scale = 1.25;
  double noise_variance = 1e-5;

  gp::GpHyperparams to_hyper() const {
    return gp::GpHyperparams{signal_variance, length_scale, noise_variance};
  }
};

inline void add_hyper_options(CLI::App* sub, HyperFlags& flags) {
  sub->add_option("--signal-variance", flags.signal_variance,
                  "prior signal variance");
  sub->add_option("--length-scale", flags.length_scale, "kernel lengthscale");
  sub->add_option("--noise-variance", flags.noise_variance,
                  "observation noise variance");
}

inline std::string json_sibling(const std::string& path) {
  return std::filesystem::path(path).replace_extension(".json").string();
}

struct TransformFlags {
  std::string in;
  std::string out;
  double epsilon = 3.0;
  double delta = 1e-5;
  long long r = 10;
  std::uint64_t seed = 0;
};

struct RunFlags {
  std::string in;
  std::vector<std::string> features;
  std::string target;
  std::string out;
  std::string release_out;
  bool log_transform = false;
  bool fit = false;
  HyperFlags hyper;
  double epsilon = 3.0;
  double delta = 1e-5;
  double delta_ucb = 0.05;
  double max_norm = 25.0;
  long long r = 10;
  long long horizon = 50;
  std::uint64_t seed = 0;
};

struct BenchFlags {
  std::string config_path;
  std::string out;
  std::string objective;
  std::string csv_path;
  std::vector<std::string> features;
  std::string target;
  bool log_transform = false;
  bool fit = false;
  bool quick = false;
  HyperFlags hyper;
  double epsilon = 3.0;
  double delta = 1e-5;
  double delta_ucb = 0.05;
  double max_norm = 25.0;
  double eps_ucb = 0.1;
  double lipschitz = 1.0;
  long long r = 10;
  long long horizon = 50;
  long long grid_dims = 2;
  long long grid_points = 100;
  long long branin_points = 31;
  int runs = 50;
  int jobs = 1;
  std::uint64_t seed = 0;
};

struct CheckFlags {
  std::string x;
  std::string z;
  std::string out;
  double nu = 0.0;
  double c_prime = 1.0;
  double c = 0.0;
  HyperFlags hyper;
};

struct ConstantsFlags {
  std::string in;
  std::string out;
  long long n = 0;
  long long dims = 0;
  long long r = 10;
  long long horizon = 50;
  double sigma_min = 0.0;
  double diameter = 0.0;
  double epsilon = 3.0;
  double delta = 1e-5;
  double eps_ucb = 0.1;
  double delta_ucb = 0.05;
  double lipschitz = 1.0;
  HyperFlags hyper;
};

inline void add_bench_options(CLI::App* sub, BenchFlags& flags) {
  sub->add_option("--config", flags.config_path,
                  "JSON config file; flags given here override its values");
  sub->add_option("--objective", flags.objective, "objective source")
      ->check(CLI::IsMember({"synthetic-gp", "branin", "csv"}));
  sub->add_option("--csv", flags.csv_path, "CSV dataset for --objective csv");
  sub->add_option("--features", flags.features,
                  "comma-separated feature column names")
      ->delimiter(',');
  sub->add_option("--target", flags.target, "target column name");
  sub->add_flag("--log-transform", flags.log_transform,
                "log-transform the targets");
  sub->add_flag("--fit", flags.fit,
                "fit hyperparameters from the data (branin and csv only)");
  sub->add_flag("--quick", flags.quick,
                "reduced profile: 50x50 grid, 10 runs");
  add_hyper_options(sub, flags.hyper);
  sub->add_option("--epsilon", flags.epsilon, kEpsilonHelp);
  sub->add_option("--delta", flags.delta, "privacy delta");
  sub->add_option("--r", flags.r, "projection dimension");
  sub->add_option("--horizon", flags.horizon, "queries per run (T)");
  sub->add_option("--runs", flags.runs, "independent runs to average");
  sub->add_option("--delta-ucb", flags.delta_ucb,
                  "confidence failure budget of the optimizer");
  sub->add_option("--max-norm", flags.max_norm, "input norm budget");
  sub->add_option("--grid-dims", flags.grid_dims, "synthetic grid dimensions");
  sub->add_option("--grid-points", flags.grid_points,
                  "synthetic grid points per dimension");
  sub->add_option("--branin-points", flags.branin_points,
                  "branin grid points per side");
  sub->add_option("--eps-ucb", flags.eps_ucb,
                  "tolerance term of the regret guarantee");
  sub->add_option("--lipschitz", flags.lipschitz,
                  "observation bound L for the derived constants");
  sub->add_option("--jobs", flags.jobs, "worker threads for the runs");
  sub->add_option("--seed", flags.seed,
                  "master seed; overrides PO_BO_SEED and the default 12345");
  auto* exclude = sub->add_flag("--exclude-observed",
                                "query each candidate at most once (default)");
  sub->add_flag("--allow-repeats", "allow repeat selections")
      ->excludes(exclude);
  sub->add_option("--out", flags.out, "output CSV path")->required();
}

inline std::pair<bench::ExperimentConfig, bool> load_bench_config(
    const std::string& path) {
  if (path.empty()) {
    return {bench::ExperimentConfig{}, false};
  }
  const serialize::json j =
      serialize::parse_json(io::read_file(path), path);
  return {serialize::config_from_json(j), j.contains("master_seed")};
}

inline bench::ExperimentConfig bench_config_from(const CLI::App* sub,
                                                 const BenchFlags& flags) {
  auto [config, file_has_seed] = load_bench_config(flags.config_path);
  if (flags.quick) {
    config.grid = bench::symmetric_grid(2, 50);
    config.runs = 10;
  }
  if (sub->count("--objective")) {
    config.objective = serialize::objective_from_name(flags.objective);
  }
  if (sub->count("--csv")) config.csv_path = flags.csv_path;
  if (sub->count("--features")) config.csv_features = flags.features;
  if (sub->count("--target")) config.csv_target = flags.target;
  if (sub->count("--log-transform")) config.log_transform = true;
  if (flags.fit) {
    config.hyper = std::nullopt;
  } else if (sub->count("--signal-variance") || sub->count("--length-scale") ||
             sub->count("--noise-variance")) {
    gp::GpHyperparams hyper =
        config.hyper.value_or(gp::GpHyperparams{1.0, 1.25, 1e-5});
    if (sub->count("--signal-variance")) {
      hyper.signal_variance = flags.hyper.signal_variance;
    }
    if (sub->count("--length-scale")) {
      hyper.length_scale = flags.hyper.length_scale;
    }
    if (sub->count("--noise-variance")) {
      hyper.noise_variance = flags.hyper.noise_variance;
    }
    config.hyper = hyper;
  }
  if (sub->count("--epsilon")) config.dp.epsilon = flags.epsilon;
  if (sub->count("--delta")) config.dp.delta = flags.delta;
  if (sub->count("--r")) config.r = flags.r;
  if (sub->count("--horizon")) config.horizon = flags.horizon;
  if (sub->count("--runs")) config.runs = flags.runs;
  if (sub->count("--delta-ucb")) config.delta_ucb = flags.delta_ucb;
  if (sub->count("--max-norm")) config.max_norm = flags.max_norm;
  if (sub->count("--grid-dims") || sub->count("--grid-points")) {
    config.grid = bench::symmetric_grid(
        sub->count("--grid-dims") ? flags.grid_dims : config.grid.dims,
        sub->count("--grid-points") ? flags.grid_points
                                    : config.grid.points_per_dim);
  }
  if (sub->count("--branin-points")) {
    config.branin_points_per_dim = flags.branin_points;
  }
  if (sub->count("--eps-ucb")) config.eps_ucb = flags.eps_ucb;
  if (sub->count("--lipschitz")) config.lipschitz = flags.lipschitz;
  if (sub->count("--jobs")) config.jobs = flags.jobs;
  if (sub->count("--allow-repeats")) config.exclude_observed = false;
  if (sub->count("--exclude-observed")) config.exclude_observed = true;
  if (sub->count("--seed")) {
    config.master_seed = flags.seed;
  } else if (!file_has_seed) {
    config.master_seed = resolve_master_seed(std::nullopt);
  }
  return config;
}

inline int do_transform(const TransformFlags& flags, const CLI::App* sub,
                        std::ostream& out) {
  const std::uint64_t master = resolve_master_seed(
      sub->count("--seed") ? std::optional<std::uint64_t>(flags.seed)
                           : std::nullopt);
  curator::InputDataset data(io::read_matrix_csv(flags.in));
  const curator::TransformedDataset release = curator::dp_transform(
      data, curator::DpParams{flags.epsilon, flags.delta}, flags.r,
      derive_seed(master, kProjectionStream, 0));
  serialize::write_transformed(release, flags.out);
  out << "wrote " << flags.out << " ("
      << (release.lifted ? "lifted" : "unlifted")
      << ", sigma_min=" << io::format_double(release.sigma_min)
      << ", omega=" << io::format_double(release.omega) << ")\n";
  return 0;
}

inline int do_run(const RunFlags& flags, const CLI::App* sub,
                  std::ostream& out) {
  bench::ExperimentConfig config;
  config.objective = bench::ObjectiveKind::kCsv;
  config.csv_path = flags.in;
  config.csv_features = flags.features;
  config.csv_target = flags.target;
  config.log_transform = flags.log_transform;
  config.hyper = flags.fit
                     ? std::nullopt
                     : std::optional<gp::GpHyperparams>(flags.hyper.to_hyper());
  config.dp = curator::DpParams{flags.epsilon, flags.delta};
  config.r = flags.r;
  config.horizon = flags.horizon;
  config.runs = 1;
  config.delta_ucb = flags.delta_ucb;
  config.max_norm = flags.max_norm;
  config.exclude_observed = sub->count("--allow-repeats") == 0;
  config.master_seed = resolve_master_seed(
      sub->count("--seed") ? std::optional<std::uint64_t>(flags.seed)
                           : std::nullopt);

  const bench::ResolvedProblem problem = bench::resolve_problem(config);
  const curator::TransformedDataset release = curator::dp_transform(
      problem.inputs, config.dp, config.r,
      derive_seed(config.master_seed, kProjectionStream, 0));
  const std::uint64_t oracle_seed =
      derive_seed(config.master_seed, kOracleStream, 0);
  const modeler::BoConfig bo{config.horizon, config.delta_ucb / 2.0,
                             config.exclude_observed, oracle_seed};
  curator::MeasurementOracle oracle(problem.fixed_truth,
                                    problem.hyper.noise_variance, oracle_seed);
  const modeler::ObservationLog log = modeler::run_bo(
      gp::CandidateMatrix(release.rows), oracle, problem.hyper, bo);
  serialize::write_observation_log(log, flags.out);
  if (!flags.release_out.empty()) {
    serialize::write_transformed(release, flags.release_out);
  }
  const bench::RegretTrace trace =
      bench::regret_metrics(log, problem.fixed_truth);
  out << "wrote " << flags.out << " (final simple regret "
      << io::format_double(trace.simple_by_t(trace.simple_by_t.size() - 1))
      << ", " << (release.lifted ? "lifted" : "unlifted") << " release)\n";
  return 0;
}

inline int do_bench(const BenchFlags& flags, const CLI::App* sub,
                    const std::vector<std::string>& invocation,
                    std::ostream& out) {
  const bench::ExperimentConfig config = bench_config_from(sub, flags);
  const bench::ExperimentReport report = bench::run_experiment(config);
  serialize::write_report_csv(report, flags.out);
  serialize::write_report_json(report, invocation, json_sibling(flags.out));
  const Eigen::Index last = config.horizon - 1;
  out << "wrote " << flags.out << " and " << json_sibling(flags.out) << "\n";
  out << "po arm:       final mean simple regret "
      << io::format_double(report.po.mean_simple(last)) << " +/- "
      << io::format_double(report.po.stderr_simple(last)) << "\n";
  out << "baseline arm: final mean simple regret "
      << io::format_double(report.baseline.mean_simple(last)) << " +/- "
      << io::format_double(report.baseline.stderr_simple(last)) << "\n";
  out << "release was " << (report.lifted ? "lifted" : "unlifted")
      << " (sigma_min=" << io::format_double(report.sigma_min)
      << ", omega=" << io::format_double(report.omega) << ")\n";
  return 0;
}

inline int do_sweep(const BenchFlags& flags, const CLI::App* sub,
                    const std::vector<long long>& r_list,
                    const std::vector<double>& epsilon_list,
                    const std::vector<std::string>& invocation,
                    std::ostream& out) {
  const bench::ExperimentConfig config = bench_config_from(sub, flags);
  std::vector<Eigen::Index> rs;
  rs.reserve(r_list.size());
  for (const long long r : r_list) {
    rs.push_back(static_cast<Eigen::Index>(r));
  }
  const std::vector<bench::SweepRow> rows =
      bench::run_sweep(config, rs, epsilon_list);
  serialize::write_sweep_csv(rows, flags.out);
  serialize::json meta;
  meta["config"] = serialize::config_to_json(config);
  meta["r_values"] = r_list;
  meta["epsilon_values"] = epsilon_list;
  meta["invocation"] = invocation;
  meta["master_seed"] = config.master_seed;
  io::atomic_write(json_sibling(flags.out), meta.dump(2) + "\n");
  out << "wrote " << flags.out << " (" << rows.size() << " cells)\n";
  return 0;
}

inline int do_check(const CheckFlags& flags, const CLI::App* sub,
                    std::ostream& out) {
  curator::InputDataset data(io::read_matrix_csv(flags.x));
  const Eigen::MatrixXd centered = curator::center_columns(data);
  const Eigen::MatrixXd z = io::read_matrix_csv(flags.z);
  const analysis::DistanceCheck distance =
      analysis::check_distance_preservation(centered, z, flags.nu,
                                            flags.c_prime);
  serialize::json j;
  j["distance"] = {{"violation_fraction", distance.violation_fraction},
                   {"worst_ratio", distance.worst_ratio},
                   {"zero_pairs", distance.zero_pairs},
                   {"zero_pair_violations", distance.zero_pair_violations}};
  if (sub->count("--c")) {
    const analysis::CovarianceCheck covariance =
        analysis::check_covariance_preservation(centered, z,
                                                flags.hyper.to_hyper(),
                                                flags.c, flags.nu);
    j["covariance"] = {
        {"violation_fraction", covariance.violation_fraction},
        {"max_relative_error", covariance.max_relative_error}};
  }
  const std::string text = j.dump(2) + "\n";
  if (flags.out.empty()) {
    out << text;
  } else {
    io::atomic_write(flags.out, text);
    out << "wrote " << flags.out << "\n";
  }
  return 0;
}

inline int do_constants(const ConstantsFlags& flags, const CLI::App* sub,
                        std::ostream& out) {
  Eigen::Index n = 0;
  Eigen::Index dims = 0;
  double sigma_min = 0.0;
  double diam = 0.0;
  if (sub->count("--in")) {
    curator::InputDataset data(io::read_matrix_csv(flags.in));
    const Eigen::MatrixXd centered = curator::center_columns(data);
    n = data.n();
    dims = data.d();
    sigma_min = curator::min_singular_value(centered);
    diam = analysis::diameter(data.rows());
  } else if (sub->count("--n") && sub->count("--dims") &&
             sub->count("--sigma-min") && sub->count("--diameter")) {
    n = static_cast<Eigen::Index>(flags.n);
    dims = static_cast<Eigen::Index>(flags.dims);
    sigma_min = flags.sigma_min;
    diam = flags.diameter;
  } else {
    throw InputError(
        "pass --in FILE, or all of --n, --dims, --sigma-min and --diameter");
  }
  const gp::GpHyperparams hyper = flags.hyper.to_hyper();
  analysis::GuaranteeParams params;
  params.eps_ucb = flags.eps_ucb;
  params.delta_ucb = flags.delta_ucb;
  params.L = flags.lipschitz;
  params.diameter_ratio = diam / hyper.length_scale;
  analysis::TheoryConstants constants = analysis::derive_guarantee(
      params, n, static_cast<Eigen::Index>(flags.r),
      curator::DpParams{flags.epsilon, flags.delta}, sigma_min, hyper);
  constants.gamma_T = analysis::gamma_surrogate(
      static_cast<Eigen::Index>(flags.horizon), dims);
  if (!(sigma_min < constants.omega)) {
    constants.regret_bound = analysis::regret_bound(
        constants, static_cast<Eigen::Index>(flags.horizon), n,
        flags.delta_ucb, hyper);
  }
  const std::string text =
      serialize::constants_to_json(constants).dump(2) + "\n";
  if (flags.out.empty()) {
    out << text;
  } else {
    io::atomic_write(flags.out, text);
    out << "wrote " << flags.out << "\n";
  }
  return 0;
}

// The hyperparameter flags that check and constants share.
inline void add_check_hyper(CLI::App* sub, HyperFlags& hyper) {
  add_hyper_options(sub, hyper);
}

}  // namespace detail

// Parses and executes one invocation. Returns the process exit code: 0 on
// success, 2 for flag or argument errors (usage goes to err), 1 for file and
// runtime failures (single-line diagnostic on err).
inline int dispatch(const std::vector<std::string>& args, std::ostream& out,
                    std::ostream& err) {
  CLI::App app{
      "pobo: Bayesian optimization on privately released candidate data"};
  app.name("pobo");
  app.require_subcommand(1);

  detail::TransformFlags tf;
  CLI::App* transform = app.add_subcommand(
      "transform", "center a dataset and release its random projection");
  transform->add_option("--in", tf.in,
                        "headerless numeric CSV, one candidate per row")
      ->required();
  transform->add_option("--epsilon", tf.epsilon, kEpsilonHelp)->required();
  transform->add_option("--delta", tf.delta, "privacy delta");
  transform->add_option("--r", tf.r, "projection dimension");
  transform->add_option(
      "--seed", tf.seed,
      "master seed; overrides PO_BO_SEED and the default 12345");
  transform->add_option("--out", tf.out,
                        "output CSV; a .json sidecar lands next to it")
      ->required();

  detail::RunFlags rf;
  CLI::App* run = app.add_subcommand(
      "run", "one outsourced optimization session on a CSV dataset");
  run->add_option("--in", rf.in, "headered CSV dataset")->required();
  run->add_option("--features", rf.features,
                  "comma-separated feature column names")
      ->delimiter(',')
      ->required();
  run->add_option("--target", rf.target, "target column name")->required();
  run->add_flag("--log-transform", rf.log_transform,
                "log-transform the targets");
  run->add_flag("--fit", rf.fit, "fit hyperparameters from the data");
  detail::add_hyper_options(run, rf.hyper);
  run->add_option("--epsilon", rf.epsilon, kEpsilonHelp)->required();
  run->add_option("--delta", rf.delta, "privacy delta");
  run->add_option("--r", rf.r, "projection dimension");
  run->add_option("--horizon", rf.horizon, "number of queries (T)");
  run->add_option("--delta-ucb", rf.delta_ucb,
                  "confidence failure budget of the optimizer");
  run->add_option("--max-norm", rf.max_norm, "input norm budget");
  run->add_flag("--allow-repeats", "allow repeat selections");
  run->add_option("--seed", rf.seed,
                  "master seed; overrides PO_BO_SEED and the default 12345");
  run->add_option("--out", rf.out, "observation log CSV")->required();
  run->add_option("--release-out", rf.release_out,
                  "also write the released projection here");

  detail::BenchFlags bf;
  CLI::App* bench_cmd = app.add_subcommand(
      "bench", "multi-run regret comparison against the raw-data baseline");
  detail::add_bench_options(bench_cmd, bf);

  detail::BenchFlags sf;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "regret table over projection dimensions and privacy levels");
  detail::add_bench_options(sweep_cmd, sf);
  std::vector<long long> r_list;
  std::vector<double> epsilon_list;
  sweep_cmd->add_option("--r-list", r_list,
                        "comma-separated projection dimensions")
      ->delimiter(',')
      ->required();
  sweep_cmd->add_option("--epsilon-list", epsilon_list,
                        "comma-separated privacy epsilons")
      ->delimiter(',')
      ->required();

  detail::CheckFlags cf;
  CLI::App* check = app.add_subcommand(
      "check", "distance and covariance distortion checks on a released pair");
  check->add_option("--x", cf.x, "source dataset CSV (centered before use)")
      ->required();
  check->add_option("--z", cf.z, "released dataset CSV")->required();
  check->add_option("--nu", cf.nu, "distortion level nu")->required();
  check->add_option("--c-prime", cf.c_prime,
                    "upper-band inflation factor (1 when unlifted)");
  check->add_option("--c", cf.c,
                    "also run the covariance check with this bound");
  detail::add_check_hyper(check, cf.hyper);
  check->add_option("--out", cf.out, "write the JSON result here instead of "
                                     "standard output");

  detail::ConstantsFlags kf;
  CLI::App* constants = app.add_subcommand(
      "constants", "derived guarantee constants and the regret bound");
  constants->add_option("--in", kf.in,
                        "headerless CSV; supplies n, dims, sigma_min and "
                        "the diameter");
  constants->add_option("--n", kf.n, "candidate count");
  constants->add_option("--dims", kf.dims, "input dimensions");
  constants->add_option("--sigma-min", kf.sigma_min,
                        "smallest singular value of the centered inputs");
  constants->add_option("--diameter", kf.diameter,
                        "diameter of the candidate set");
  constants->add_option("--r", kf.r, "projection dimension");
  constants->add_option("--horizon", kf.horizon,
                        "horizon for the information-gain surrogate");
  constants->add_option("--epsilon", kf.epsilon, kEpsilonHelp);
  constants->add_option("--delta", kf.delta, "privacy delta");
  constants->add_option("--eps-ucb", kf.eps_ucb,
                        "tolerance term of the regret guarantee");
  constants->add_option("--delta-ucb", kf.delta_ucb,
                        "confidence failure budget of the optimizer");
  constants->add_option("--lipschitz", kf.lipschitz, "observation bound L");
  detail::add_check_hyper(constants, kf.hyper);
  constants->add_option("--out", kf.out,
                        "write the JSON result here instead of standard "
                        "output");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const std::vector<CLI::App*> active = app.get_subcommands();
    out << (active.empty() ? app.help() : active.front()->help());
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 2;
  }

  std::vector<std::string> invocation;
  invocation.reserve(args.size() + 1);
  invocation.push_back("pobo");
  invocation.insert(invocation.end(), args.begin(), args.end());

  try {
    if (transform->parsed()) return detail::do_transform(tf, transform, out);
    if (run->parsed()) return detail::do_run(rf, run, out);
    if (bench_cmd->parsed()) {
      return detail::do_bench(bf, bench_cmd, invocation, out);
    }
    if (sweep_cmd->parsed()) {
      return detail::do_sweep(sf, sweep_cmd, r_list, epsilon_list, invocation,
                              out);
    }
    if (check->parsed()) return detail::do_check(cf, check, out);
    if (constants->parsed()) return detail::do_constants(kf, constants, out);
    err << "error: no subcommand selected\n" << app.help();
    return 2;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const ContractError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

inline int dispatch(const std::vector<std::string>& args) {
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace pobo::cli

#endif  // POBO_CLI_HPP_
