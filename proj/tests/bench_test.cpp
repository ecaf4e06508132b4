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

#include "pobo/bench.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>

#include "pobo/curator.hpp"
#include "pobo/errors.hpp"
#include "pobo/io.hpp"
#include "pobo/random.hpp"

namespace pobo::bench {
namespace {

std::string TempPath(const std::string& name) {
  return (std::filesystem::path(::testing::TempDir()) / name).string();
}

GridSpec SmallGrid(Eigen::Index dims, Eigen::Index per_dim) {
  return symmetric_grid(dims, per_dim);
}

TEST(GridSpecTest, ValidatesShape) {
  GridSpec spec = symmetric_grid(2, 4);
  EXPECT_NO_THROW(spec.validate());
  EXPECT_EQ(spec.total(), 16);

  GridSpec tiny = symmetric_grid(1, 1);
  EXPECT_THROW(tiny.validate(), InputError);

  GridSpec bad = symmetric_grid(2, 4);
  bad.lower(0) = bad.upper(0);
  EXPECT_THROW(bad.validate(), InputError);
}

TEST(GridPoints, HandOrderedExample) {
  GridSpec spec;
  spec.dims = 2;
  spec.points_per_dim = 2;
  spec.lower = Eigen::VectorXd::Zero(2);
  spec.upper = Eigen::VectorXd::Ones(2);
  Eigen::MatrixXd pts = grid_points(spec);
  Eigen::MatrixXd expected(4, 2);
  expected << 0, 0, 0, 1, 1, 0, 1, 1;
  EXPECT_EQ(pts, expected);
}

TEST(GridPoints, CoversBoundsInclusive) {
  GridSpec spec = symmetric_grid(2, 5);
  Eigen::MatrixXd pts = grid_points(spec);
  EXPECT_EQ(pts.rows(), 25);
  EXPECT_EQ(pts.col(0).minCoeff(), spec.lower(0));
  EXPECT_EQ(pts.col(0).maxCoeff(), spec.upper(0));
  EXPECT_EQ(pts.col(1).minCoeff(), spec.lower(1));
  EXPECT_EQ(pts.col(1).maxCoeff(), spec.upper(1));
  EXPECT_EQ(spec.lower(0), -5.0);
  EXPECT_EQ(spec.upper(0), 5.0);
}

TEST(SampleGp, DeterministicPerSeed) {
  GridSpec spec = SmallGrid(2, 5);
  gp::GpHyperparams hyper{1.0, 0.8, 1e-5};
  Eigen::VectorXd a = sample_gp_on_grid(spec, hyper, 42);
  Eigen::VectorXd b = sample_gp_on_grid(spec, hyper, 42);
  EXPECT_EQ(a, b);
  Eigen::VectorXd c = sample_gp_on_grid(spec, hyper, 43);
  EXPECT_NE(a, c);
}

TEST(SampleGp, MarginalMomentsMatchPrior) {
  GridSpec spec = SmallGrid(2, 5);
  gp::GpHyperparams hyper{1.0, 0.8, 1e-5};
  const int draws = 200;
  const Eigen::Index probe = 7;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int s = 0; s < draws; ++s) {
    Eigen::VectorXd f =
        sample_gp_on_grid(spec, hyper, 2026 + static_cast<std::uint64_t>(s));
    sum += f(probe);
    sum_sq += f(probe) * f(probe);
  }
  const double mean = sum / draws;
  const double variance = sum_sq / draws - mean * mean;
  EXPECT_NEAR(variance, hyper.signal_variance, 0.15 * hyper.signal_variance);
  EXPECT_NEAR(mean, 0.0, 4.0 / std::sqrt(static_cast<double>(draws)));
}

TEST(BraninHoo, ThreeGlobalMinima) {
  const double pi = std::numbers::pi;
  EXPECT_NEAR(branin_hoo(pi, 2.275), 0.397887, 1e-5);
  EXPECT_NEAR(branin_hoo(-pi, 12.275), 0.397887, 1e-5);
  EXPECT_NEAR(branin_hoo(9.42478, 2.475), 0.397887, 1e-5);
  EXPECT_GT(branin_hoo(0.0, 0.0), 0.397887);
}

TEST(LoadCsvDataset, ParsesShapeAndValues) {
  const std::string path = TempPath("bench_basic.csv");
  io::atomic_write(path,
                   "alpha,skip,target\n"
                   "1.5,9,0.25\n"
                   "-2,8,0.5\n"
                   "0.75,7,-1.25\n");
  auto [data, targets] = load_csv_dataset(path, {"alpha"}, "target");
  EXPECT_EQ(data.n(), 3);
  EXPECT_EQ(data.d(), 1);
  EXPECT_EQ(data.rows()(1, 0), -2.0);
  EXPECT_EQ(targets.size(), 3);
  EXPECT_EQ(targets(2), -1.25);
}

TEST(LoadCsvDataset, MissingColumnIsSchemaError) {
  const std::string path = TempPath("bench_missing.csv");
  io::atomic_write(path, "a,b\n1,2\n3,4\n");
  EXPECT_THROW(load_csv_dataset(path, {"a", "z"}, "b"), SchemaError);
  EXPECT_THROW(load_csv_dataset(path, {"a"}, "zz"), SchemaError);
}

TEST(LoadCsvDataset, BadCellNamesRow) {
  const std::string path = TempPath("bench_badcell.csv");
  io::atomic_write(path, "a,b\n1,2\npotato,4\n5,6\n");
  try {
    load_csv_dataset(path, {"a"}, "b");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
  }
}

TEST(LoadCsvDataset, MissingFileIsIoError) {
  EXPECT_THROW(load_csv_dataset(TempPath("no_such_file.csv"), {"a"}, "b"),
               IoError);
}

TEST(LoadCsvDataset, RoundTripThroughWriter) {
  GaussianStream stream(55);
  Eigen::MatrixXd m(6, 3);
  for (Eigen::Index i = 0; i < 6; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      m(i, j) = stream.next_gaussian();
    }
  }
  const std::string path = TempPath("bench_roundtrip.csv");
  std::string text = "f0,f1,y\n";
  for (Eigen::Index i = 0; i < 6; ++i) {
    text += io::format_double(m(i, 0)) + "," + io::format_double(m(i, 1)) +
            "," + io::format_double(m(i, 2)) + "\n";
  }
  io::atomic_write(path, text);
  auto [data, targets] = load_csv_dataset(path, {"f0", "f1"}, "y");
  EXPECT_LT((data.rows() - m.leftCols(2)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((targets - m.col(2)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PreprocessInputs, ScalesSingleRowExample) {
  Eigen::MatrixXd x(1, 2);
  x << 3.0, 4.0;
  PreprocessResult out = preprocess_inputs(x, std::nullopt, 25.0,
                                           std::nullopt, false);
  EXPECT_DOUBLE_EQ(out.inputs(0, 0), 15.0);
  EXPECT_DOUBLE_EQ(out.inputs(0, 1), 20.0);
}

TEST(PreprocessInputs, IdentityWhenAlreadyNormalized) {
  Eigen::MatrixXd x(2, 2);
  x << 25.0, 0.0, 0.0, 10.0;
  PreprocessResult out = preprocess_inputs(x, std::nullopt, 25.0,
                                           std::nullopt, false);
  EXPECT_EQ(out.inputs, x);
}

TEST(PreprocessInputs, MaxNormIsForced) {
  GaussianStream stream(66);
  Eigen::MatrixXd x(20, 3);
  for (Eigen::Index i = 0; i < 20; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) {
      x(i, j) = 10.0 * stream.next_gaussian();
    }
  }
  PreprocessResult out = preprocess_inputs(x, std::nullopt, 25.0,
                                           std::nullopt, false);
  EXPECT_NEAR(out.inputs.rowwise().norm().maxCoeff(), 25.0, 1e-9);
}

TEST(PreprocessInputs, DividesByLengthscalesFirst) {
  Eigen::MatrixXd x(2, 2);
  x << 4.0, 9.0, 2.0, 3.0;
  Eigen::VectorXd scales(2);
  scales << 2.0, 3.0;
  PreprocessResult out = preprocess_inputs(x, scales, 25.0,
                                           std::nullopt, false);
  // After division the rows are (2,3) and (1,1); the max norm sqrt(13)
  // rescales to 25.
  const double factor = 25.0 / std::sqrt(13.0);
  EXPECT_NEAR(out.inputs(0, 0), 2.0 * factor, 1e-12);
  EXPECT_NEAR(out.inputs(1, 1), 1.0 * factor, 1e-12);
}

TEST(PreprocessInputs, AllZeroRowsRejected) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(3, 2);
  EXPECT_THROW(preprocess_inputs(x, std::nullopt, 25.0, std::nullopt, false),
               InputError);
}

TEST(PreprocessInputs, LogTransformBranches) {
  Eigen::MatrixXd x(3, 1);
  x << 1.0, 2.0, 3.0;
  Eigen::VectorXd positive(3);
  positive << 1.0, std::exp(1.0), 10.0;
  PreprocessResult a = preprocess_inputs(x, std::nullopt, 25.0,
                                         positive, true);
  EXPECT_DOUBLE_EQ(a.targets(0), 0.0);
  EXPECT_DOUBLE_EQ(a.targets(1), 1.0);

  Eigen::VectorXd mixed(3);
  mixed << -2.0, 0.0, 5.0;
  PreprocessResult b = preprocess_inputs(x, std::nullopt, 25.0, mixed, true);
  // Shifted to y - min + 1 = (1, 3, 8) before the log.
  EXPECT_DOUBLE_EQ(b.targets(0), 0.0);
  EXPECT_DOUBLE_EQ(b.targets(1), std::log(3.0));
  EXPECT_DOUBLE_EQ(b.targets(2), std::log(8.0));
}

TEST(RegretMetrics, HandExample) {
  modeler::ObservationLog log;
  log.entries = {{1, 0, 1.0, 0.0}, {2, 1, 2.0, 0.0}, {3, 2, 3.0, 0.0}};
  Eigen::VectorXd truth(4);
  truth << 0.5, 1.5, 1.0, 2.0;
  RegretTrace trace = regret_metrics(log, truth);
  ASSERT_EQ(trace.instantaneous.size(), 3);
  EXPECT_DOUBLE_EQ(trace.instantaneous(0), 1.5);
  EXPECT_DOUBLE_EQ(trace.instantaneous(1), 0.5);
  EXPECT_DOUBLE_EQ(trace.instantaneous(2), 1.0);
  EXPECT_DOUBLE_EQ(trace.cumulative, 3.0);
  EXPECT_DOUBLE_EQ(trace.simple_by_t(0), 1.5);
  EXPECT_DOUBLE_EQ(trace.simple_by_t(1), 0.5);
  EXPECT_DOUBLE_EQ(trace.simple_by_t(2), 0.5);
}

TEST(RegretMetrics, OptimalSelectionsGiveZero) {
  modeler::ObservationLog log;
  log.entries = {{1, 2, 1.0, 0.0}, {2, 2, 2.0, 0.0}};
  Eigen::VectorXd truth(3);
  truth << 0.0, 1.0, 4.0;
  RegretTrace trace = regret_metrics(log, truth);
  EXPECT_EQ(trace.instantaneous.maxCoeff(), 0.0);
  EXPECT_EQ(trace.cumulative, 0.0);
  EXPECT_EQ(trace.simple_by_t(1), 0.0);
}

TEST(RegretMetrics, UsesTruthNotNoisyY) {
  modeler::ObservationLog log;
  log.entries = {{1, 0, 1.0, 99.0}};
  Eigen::VectorXd truth(2);
  truth << 1.0, 3.0;
  RegretTrace trace = regret_metrics(log, truth);
  EXPECT_DOUBLE_EQ(trace.instantaneous(0), 2.0);
}

TEST(RegretMetrics, SimpleRegretNonIncreasing) {
  GaussianStream stream(77);
  modeler::ObservationLog log;
  Eigen::VectorXd truth(12);
  for (Eigen::Index i = 0; i < 12; ++i) truth(i) = stream.next_gaussian();
  for (Eigen::Index t = 1; t <= 10; ++t) {
    log.entries.push_back(
        {t, static_cast<Eigen::Index>(stream.next_index(12)),
         static_cast<double>(t), 0.0});
  }
  RegretTrace trace = regret_metrics(log, truth);
  for (Eigen::Index t = 1; t < 10; ++t) {
    EXPECT_LE(trace.simple_by_t(t), trace.simple_by_t(t - 1));
  }
  EXPECT_NO_THROW(trace.validate());
}

TEST(RegretMetrics, RejectsOutOfRangeIndices) {
  modeler::ObservationLog log;
  log.entries = {{1, 5, 1.0, 0.0}};
  Eigen::VectorXd truth(3);
  truth << 0.0, 1.0, 2.0;
  EXPECT_THROW(regret_metrics(log, truth), InputError);
}

ExperimentConfig QuickSyntheticConfig() {
  ExperimentConfig config;
  config.objective = ObjectiveKind::kSyntheticGp;
  config.grid = symmetric_grid(2, 8);
  config.hyper = gp::GpHyperparams{1.0, 1.25, 1e-5};
  config.dp = curator::DpParams{1e6, 1e-5};
  config.r = 4;
  config.horizon = 5;
  config.runs = 2;
  config.delta_ucb = 0.05;
  config.master_seed = 2024;
  config.exclude_observed = true;
  config.max_norm = 25.0;
  return config;
}

TEST(RunExperiment, ReportShapesAndFlags) {
  ExperimentConfig config = QuickSyntheticConfig();
  ExperimentReport report = run_experiment(config);
  EXPECT_EQ(report.po.mean_simple.size(), config.horizon);
  EXPECT_EQ(report.po.stderr_simple.size(), config.horizon);
  EXPECT_EQ(report.baseline.mean_simple.size(), config.horizon);
  EXPECT_EQ(report.po_final_simple.size(),
            static_cast<std::size_t>(config.runs));
  EXPECT_FALSE(report.lifted);
  EXPECT_GT(report.sigma_min, report.omega);
  EXPECT_GE(report.dominance_fraction, 0.0);
  EXPECT_LE(report.dominance_fraction, 1.0);
  EXPECT_DOUBLE_EQ(report.hyper.length_scale,
                   1.25 * 25.0 / (5.0 * std::sqrt(2.0)));
}

TEST(RunExperiment, SingleRunEqualsManualPipeline) {
  ExperimentConfig config = QuickSyntheticConfig();
  config.runs = 1;
  ExperimentReport report = run_experiment(config);
  for (Eigen::Index t = 0; t < config.horizon; ++t) {
    EXPECT_EQ(report.po.stderr_simple(t), 0.0);
  }

  ResolvedProblem problem = resolve_problem(config);
  const std::uint64_t objective_seed =
      derive_seed(config.master_seed, kObjectiveStream, 0);
  const std::uint64_t projection_seed =
      derive_seed(config.master_seed, kProjectionStream, 0);
  const std::uint64_t oracle_seed =
      derive_seed(config.master_seed, kOracleStream, 0);
  Eigen::VectorXd truth =
      sample_gp(problem.inputs.rows(), problem.hyper, objective_seed);
  curator::TransformedDataset released = curator::dp_transform(
      problem.inputs, config.dp, config.r, projection_seed);
  modeler::BoConfig bo{config.horizon, config.delta_ucb / 2.0,
                       config.exclude_observed, oracle_seed};
  curator::MeasurementOracle oracle(truth, problem.hyper.noise_variance,
                                    oracle_seed);
  modeler::ObservationLog log =
      modeler::run_bo(gp::CandidateMatrix(released.rows), oracle,
                      problem.hyper, bo);
  RegretTrace trace = regret_metrics(log, truth);
  for (Eigen::Index t = 0; t < config.horizon; ++t) {
    EXPECT_EQ(report.po.mean_simple(t), trace.simple_by_t(t));
  }
}

TEST(RunExperiment, DeterministicAcrossCalls) {
  ExperimentConfig config = QuickSyntheticConfig();
  ExperimentReport a = run_experiment(config);
  ExperimentReport b = run_experiment(config);
  EXPECT_EQ(a.po.mean_simple, b.po.mean_simple);
  EXPECT_EQ(a.baseline.mean_simple, b.baseline.mean_simple);
  EXPECT_EQ(a.po.stderr_simple, b.po.stderr_simple);
  EXPECT_EQ(a.dominance_fraction, b.dominance_fraction);
}

TEST(RunExperiment, DeterministicAcrossJobCounts) {
  ExperimentConfig config = QuickSyntheticConfig();
  config.runs = 4;
  config.jobs = 1;
  ExperimentReport serial = run_experiment(config);
  config.jobs = 4;
  ExperimentReport parallel = run_experiment(config);
  EXPECT_EQ(serial.po.mean_simple, parallel.po.mean_simple);
  EXPECT_EQ(serial.baseline.mean_simple, parallel.baseline.mean_simple);
  EXPECT_EQ(serial.dominance_fraction, parallel.dominance_fraction);
}

TEST(RunExperiment, MeanLiesBetweenRunExtremes) {
  ExperimentConfig config = QuickSyntheticConfig();
  config.runs = 4;
  ExperimentReport report = run_experiment(config);
  const double mean =
      report.po.mean_simple(config.horizon - 1);
  const auto [lo, hi] = std::minmax_element(report.po_final_simple.begin(),
                                            report.po_final_simple.end());
  EXPECT_GE(mean, *lo - 1e-12);
  EXPECT_LE(mean, *hi + 1e-12);
}

TEST(RunExperiment, EpsilonInvarianceWhileUnlifted) {
  ExperimentConfig a = QuickSyntheticConfig();
  a.dp.epsilon = 1e6;
  ExperimentConfig b = QuickSyntheticConfig();
  b.dp.epsilon = 4e5;
  ExperimentReport ra = run_experiment(a);
  ExperimentReport rb = run_experiment(b);
  ASSERT_FALSE(ra.lifted);
  ASSERT_FALSE(rb.lifted);
  EXPECT_EQ(ra.po.mean_simple, rb.po.mean_simple);
  EXPECT_EQ(ra.po.stderr_simple, rb.po.stderr_simple);
}

TEST(RunExperiment, LiftedFlagTracksThreshold) {
  ExperimentConfig config = QuickSyntheticConfig();
  config.dp.epsilon = 0.5;
  ExperimentReport report = run_experiment(config);
  EXPECT_TRUE(report.lifted);
  EXPECT_LT(report.sigma_min, report.omega);
  EXPECT_FALSE(report.constants.has_value() &&
               report.constants->regret_bound > 0.0);
}

TEST(RunExperiment, ExhaustionDrivesSimpleRegretToZero) {
  ExperimentConfig config = QuickSyntheticConfig();
  config.grid = symmetric_grid(2, 3);
  config.horizon = 9;
  config.runs = 2;
  config.exclude_observed = true;
  config.hyper = gp::GpHyperparams{1.0, 1.25, 1e-8};
  ExperimentReport report = run_experiment(config);
  EXPECT_EQ(report.baseline.mean_simple(config.horizon - 1), 0.0);
  EXPECT_EQ(report.po.mean_simple(config.horizon - 1), 0.0);
}

TEST(RunExperiment, PrivateArmDoesNotBeatBaselineSystematically) {
  ExperimentConfig config = QuickSyntheticConfig();
  config.runs = 5;
  config.horizon = 10;
  ExperimentReport report = run_experiment(config);
  const Eigen::Index last = config.horizon - 1;
  const double slack = 2.0 * (report.po.stderr_simple(last) +
                              report.baseline.stderr_simple(last));
  EXPECT_GE(report.po.mean_simple(last),
            report.baseline.mean_simple(last) - slack - 1e-12);
}

TEST(RunExperiment, ConstantsPresentWhenUnlifted) {
  ExperimentConfig config = QuickSyntheticConfig();
  config.eps_ucb = 0.25;
  ExperimentReport report = run_experiment(config);
  ASSERT_TRUE(report.constants.has_value());
  EXPECT_EQ(report.constants->eps_ucb, 0.25);
  EXPECT_EQ(report.constants->C_prime, 1.0);
  EXPECT_GT(report.constants->regret_bound, 0.0);
  EXPECT_GT(report.constants->gamma_T, 0.0);
}

TEST(RunExperiment, BraninObjectiveWithFittedHyper) {
  ExperimentConfig config;
  config.objective = ObjectiveKind::kBranin;
  config.hyper = std::nullopt;
  config.dp = curator::DpParams{1e6, 1e-3};
  config.r = 4;
  config.horizon = 5;
  config.runs = 2;
  config.master_seed = 7;
  config.branin_points_per_dim = 7;
  ExperimentReport report = run_experiment(config);
  EXPECT_EQ(report.po.mean_simple.size(), 5);
  EXPECT_GT(report.hyper.length_scale, 0.0);
  for (Eigen::Index t = 1; t < 5; ++t) {
    EXPECT_LE(report.baseline.mean_simple(t),
              report.baseline.mean_simple(t - 1) + 1e-12);
  }
}

TEST(RunExperiment, CsvObjectiveEndToEnd) {
  const std::string path = TempPath("bench_objective.csv");
  GaussianStream stream(88);
  std::string text = "x0,x1,y\n";
  for (int i = 0; i < 20; ++i) {
    const double x0 = stream.next_gaussian();
    const double x1 = stream.next_gaussian();
    const double y = x0 * x0 + 0.5 * x1 + stream.next_gaussian() * 0.01;
    text += io::format_double(x0) + "," + io::format_double(x1) + "," +
            io::format_double(y) + "\n";
  }
  io::atomic_write(path, text);

  ExperimentConfig config;
  config.objective = ObjectiveKind::kCsv;
  config.csv_path = path;
  config.csv_features = {"x0", "x1"};
  config.csv_target = "y";
  config.hyper = std::nullopt;
  config.dp = curator::DpParams{1e6, 1e-5};
  config.r = 3;
  config.horizon = 4;
  config.runs = 2;
  config.master_seed = 11;
  ExperimentReport report = run_experiment(config);
  EXPECT_EQ(report.po.mean_simple.size(), 4);
  EXPECT_EQ(report.baseline.mean_simple.size(), 4);
  ExperimentReport again = run_experiment(config);
  EXPECT_EQ(report.po.mean_simple, again.po.mean_simple);
}

TEST(RunSweep, TableShapeAndPairing) {
  ExperimentConfig config = QuickSyntheticConfig();
  config.runs = 2;
  config.horizon = 4;
  std::vector<Eigen::Index> rs = {2, 4};
  std::vector<double> epsilons = {4e5, 1e6};
  std::vector<SweepRow> rows = run_sweep(config, rs, epsilons);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].r, 2);
  EXPECT_EQ(rows[0].epsilon, 4e5);
  EXPECT_EQ(rows[1].epsilon, 1e6);
  EXPECT_EQ(rows[3].r, 4);
  for (const SweepRow& row : rows) {
    EXPECT_FALSE(row.lifted);
    EXPECT_GE(row.mean_simple, 0.0);
    EXPECT_GE(row.stderr_simple, 0.0);
  }
  // Both epsilons leave the release unlifted, so each r's pair of rows
  // reports identical regret.
  EXPECT_EQ(rows[0].mean_simple, rows[1].mean_simple);
  EXPECT_EQ(rows[2].mean_simple, rows[3].mean_simple);
}

TEST(RunSweep, MarksLiftedCells) {
  ExperimentConfig config = QuickSyntheticConfig();
  config.runs = 1;
  config.horizon = 3;
  std::vector<SweepRow> rows = run_sweep(config, {4}, {0.5, 1e6});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_TRUE(rows[0].lifted);
  EXPECT_FALSE(rows[1].lifted);
}

}  // namespace
}  // namespace pobo::bench
