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

// File formats: the released-dataset CSV with its JSON sidecar, observation
// logs, experiment configs, benchmark reports and sweep tables.

#ifndef POBO_SERIALIZE_HPP_
#define POBO_SERIALIZE_HPP_

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pobo/analysis.hpp"
#include "pobo/bench.hpp"
#include "pobo/curator.hpp"
#include "pobo/errors.hpp"
#include "pobo/gp.hpp"
#include "pobo/io.hpp"
#include "pobo/modeler.hpp"
#include "pobo/random.hpp"

namespace pobo::serialize {

using json = nlohmann::json;

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(what + " is not valid json: " + e.what());
  }
}

inline std::string sidecar_path(const std::string& csv_path) {
  return std::filesystem::path(csv_path).replace_extension(".json").string();
}

// Writes the released matrix as CSV plus a JSON sidecar carrying the release
// provenance, both atomically.
inline void write_transformed(const curator::TransformedDataset& data,
                              const std::string& path) {
  data.validate();
  json sidecar;
  sidecar["n"] = data.rows.rows();
  sidecar["d"] = data.source_dim;
  sidecar["r"] = data.r;
  sidecar["epsilon"] = data.dp.epsilon;
  sidecar["delta"] = data.dp.delta;
  sidecar["omega"] = data.omega;
  sidecar["sigma_min"] = data.sigma_min;
  sidecar["lifted"] = data.lifted;
  sidecar["projection_seed"] = data.projection_seed;
  io::write_matrix_csv(path, data.rows);
  io::atomic_write(sidecar_path(path), sidecar.dump(2) + "\n");
}

// Reads a released matrix and its sidecar back, checking that the two files
// describe the same release.
inline curator::TransformedDataset read_transformed(const std::string& path) {
  Eigen::MatrixXd rows = io::read_matrix_csv(path);
  const std::string side_path = sidecar_path(path);
  const json sidecar = parse_json(io::read_file(side_path), side_path);
  curator::TransformedDataset data;
  try {
    if (sidecar.at("n").get<Eigen::Index>() != rows.rows()) {
      throw SchemaError("sidecar reports " +
                        std::to_string(sidecar["n"].get<Eigen::Index>()) +
                        " rows but " + path + " has " +
                        std::to_string(rows.rows()));
    }
    if (sidecar.at("r").get<Eigen::Index>() != rows.cols()) {
      throw SchemaError("sidecar reports r = " +
                        std::to_string(sidecar["r"].get<Eigen::Index>()) +
                        " but " + path + " has " +
                        std::to_string(rows.cols()) + " columns");
    }
    data.rows = std::move(rows);
    data.r = data.rows.cols();
    data.source_dim = sidecar.at("d").get<Eigen::Index>();
    data.dp.epsilon = sidecar.at("epsilon").get<double>();
    data.dp.delta = sidecar.at("delta").get<double>();
    data.omega = sidecar.at("omega").get<double>();
    data.sigma_min = sidecar.at("sigma_min").get<double>();
    data.lifted = sidecar.at("lifted").get<bool>();
    data.projection_seed = sidecar.at("projection_seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw SchemaError(side_path + ": " + e.what());
  }
  try {
    data.validate();
  } catch (const InputError& e) {
    throw SchemaError(side_path + " is inconsistent: " + e.what());
  }
  return data;
}

inline constexpr std::string_view kObservationLogHeader =
    "t,row_index,beta_t,y_t";

inline void write_observation_log(const modeler::ObservationLog& log,
                                  const std::string& path) {
  log.validate();
  std::string out = std::string(kObservationLogHeader) + "\n";
  for (const modeler::LogEntry& entry : log.entries) {
    out += std::to_string(entry.t) + "," + std::to_string(entry.row_index) +
           "," + io::format_double(entry.beta_t) + "," +
           io::format_double(entry.y_t) + "\n";
  }
  io::atomic_write(path, out);
}

inline modeler::ObservationLog read_observation_log(const std::string& path) {
  const std::string text = io::read_file(path);
  const std::vector<std::string_view> lines = io::split_lines(text);
  if (lines.empty() || lines[0] != kObservationLogHeader) {
    throw SchemaError("observation log " + path + " must start with '" +
                      std::string(kObservationLogHeader) + "'");
  }
  modeler::ObservationLog log;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::vector<std::string_view> fields = io::split_fields(lines[i]);
    if (fields.size() != 4) {
      throw SchemaError("row " + std::to_string(i) + " of " + path + " has " +
                        std::to_string(fields.size()) +
                        " fields, expected 4");
    }
    auto number = [&](std::string_view field) {
      double value = 0.0;
      if (!io::try_parse_double(field, value)) {
        throw ParseError("row " + std::to_string(i) + " of " + path +
                         ": cannot parse '" + std::string(field) +
                         "' as a number");
      }
      return value;
    };
    auto index = [&](std::string_view field) {
      const double value = number(field);
      if (std::floor(value) != value || std::abs(value) > 9.0e15) {
        throw ParseError("row " + std::to_string(i) + " of " + path + ": '" +
                         std::string(field) + "' is not an integer");
      }
      return static_cast<Eigen::Index>(value);
    };
    modeler::LogEntry entry;
    entry.t = index(fields[0]);
    entry.row_index = index(fields[1]);
    entry.beta_t = number(fields[2]);
    entry.y_t = number(fields[3]);
    log.entries.push_back(entry);
  }
  log.validate();
  return log;
}

// The information-gain entry is labeled a surrogate in every serialized
// artifact because only its growth order is exact.
inline json constants_to_json(const analysis::TheoryConstants& constants) {
  json j;
  j["mu"] = constants.mu;
  j["nu"] = constants.nu;
  j["r_min"] = constants.r_min;
  j["omega"] = constants.omega;
  j["C"] = constants.C;
  j["C_prime"] = constants.C_prime;
  j["C1"] = constants.C1;
  j["C2"] = constants.C2;
  j["gamma_T_surrogate"] = constants.gamma_T;
  j["regret_bound"] = constants.regret_bound > 0.0
                          ? json(constants.regret_bound)
                          : json(nullptr);
  j["eps_ucb"] = constants.eps_ucb;
  j["delta_ucb"] = constants.delta_ucb;
  return j;
}

inline analysis::TheoryConstants constants_from_json(const json& j) {
  analysis::TheoryConstants constants;
  try {
    constants.mu = j.at("mu").get<double>();
    constants.nu = j.at("nu").get<double>();
    constants.r_min = j.at("r_min").get<Eigen::Index>();
    constants.omega = j.at("omega").get<double>();
    constants.C = j.at("C").get<double>();
    constants.C_prime = j.at("C_prime").get<double>();
    constants.C1 = j.at("C1").get<double>();
    constants.C2 = j.at("C2").get<double>();
    constants.gamma_T = j.at("gamma_T_surrogate").get<double>();
    constants.regret_bound =
        j.at("regret_bound").is_null() ? 0.0
                                       : j.at("regret_bound").get<double>();
    constants.eps_ucb = j.at("eps_ucb").get<double>();
    constants.delta_ucb = j.at("delta_ucb").get<double>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("constants json: ") + e.what());
  }
  return constants;
}

inline json hyper_to_json(const gp::GpHyperparams& hyper) {
  json j;
  j["signal_variance"] = hyper.signal_variance;
  j["length_scale"] = hyper.length_scale;
  j["noise_variance"] = hyper.noise_variance;
  return j;
}

inline gp::GpHyperparams hyper_from_json(const json& j) {
  gp::GpHyperparams hyper;
  try {
    hyper.signal_variance = j.at("signal_variance").get<double>();
    hyper.length_scale = j.at("length_scale").get<double>();
    hyper.noise_variance = j.at("noise_variance").get<double>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("hyperparameter json: ") + e.what());
  }
  return hyper;
}

inline std::string objective_name(bench::ObjectiveKind kind) {
  switch (kind) {
    case bench::ObjectiveKind::kSyntheticGp:
      return "synthetic-gp";
    case bench::ObjectiveKind::kBranin:
      return "branin";
    case bench::ObjectiveKind::kCsv:
      return "csv";
  }
  throw InputError("unknown objective kind");
}

inline bench::ObjectiveKind objective_from_name(const std::string& name) {
  if (name == "synthetic-gp") return bench::ObjectiveKind::kSyntheticGp;
  if (name == "branin") return bench::ObjectiveKind::kBranin;
  if (name == "csv") return bench::ObjectiveKind::kCsv;
  throw SchemaError("unknown objective '" + name +
                    "'; expected synthetic-gp, branin or csv");
}

inline std::vector<double> to_std_vector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline Eigen::VectorXd to_eigen_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

inline json grid_to_json(const bench::GridSpec& grid) {
  json j;
  j["dims"] = grid.dims;
  j["points_per_dim"] = grid.points_per_dim;
  j["lower"] = to_std_vector(grid.lower);
  j["upper"] = to_std_vector(grid.upper);
  return j;
}

inline json config_to_json(const bench::ExperimentConfig& config) {
  json j;
  j["objective"] = objective_name(config.objective);
  j["csv_path"] = config.csv_path;
  j["csv_features"] = config.csv_features;
  j["csv_target"] = config.csv_target;
  j["log_transform"] = config.log_transform;
  j["hyper"] =
      config.hyper.has_value() ? hyper_to_json(*config.hyper) : json("fit");
  j["dp"] = {{"epsilon", config.dp.epsilon}, {"delta", config.dp.delta}};
  j["r"] = config.r;
  j["horizon"] = config.horizon;
  j["runs"] = config.runs;
  j["delta_ucb"] = config.delta_ucb;
  j["master_seed"] = config.master_seed;
  j["exclude_observed"] = config.exclude_observed;
  j["max_norm"] = config.max_norm;
  j["grid"] = grid_to_json(config.grid);
  j["branin_points_per_dim"] = config.branin_points_per_dim;
  j["eps_ucb"] = config.eps_ucb;
  j["lipschitz"] =
      config.lipschitz.has_value() ? json(*config.lipschitz) : json(nullptr);
  j["jobs"] = config.jobs;
  return j;
}

// Builds a config from JSON, filling every missing key from the defaults.
// "hyper" accepts either an object or the string "fit".
inline bench::ExperimentConfig config_from_json(const json& j) {
  bench::ExperimentConfig config;
  try {
    if (j.contains("objective")) {
      config.objective = objective_from_name(j["objective"].get<std::string>());
    }
    config.csv_path = j.value("csv_path", config.csv_path);
    config.csv_features = j.value("csv_features", config.csv_features);
    config.csv_target = j.value("csv_target", config.csv_target);
    config.log_transform = j.value("log_transform", config.log_transform);
    if (j.contains("hyper")) {
      if (j["hyper"].is_string()) {
        if (j["hyper"].get<std::string>() != "fit") {
          throw SchemaError("hyper must be an object or the string 'fit'");
        }
        config.hyper = std::nullopt;
      } else {
        config.hyper = hyper_from_json(j["hyper"]);
      }
    }
    if (j.contains("dp")) {
      config.dp.epsilon = j["dp"].value("epsilon", config.dp.epsilon);
      config.dp.delta = j["dp"].value("delta", config.dp.delta);
    }
    config.r = j.value("r", config.r);
    config.horizon = j.value("horizon", config.horizon);
    config.runs = j.value("runs", config.runs);
    config.delta_ucb = j.value("delta_ucb", config.delta_ucb);
    config.master_seed = j.value("master_seed", config.master_seed);
    config.exclude_observed =
        j.value("exclude_observed", config.exclude_observed);
    config.max_norm = j.value("max_norm", config.max_norm);
    if (j.contains("grid")) {
      const json& jg = j["grid"];
      bench::GridSpec grid = bench::symmetric_grid(
          jg.value("dims", config.grid.dims),
          jg.value("points_per_dim", config.grid.points_per_dim));
      if (jg.contains("lower")) {
        grid.lower = to_eigen_vector(jg["lower"].get<std::vector<double>>());
      }
      if (jg.contains("upper")) {
        grid.upper = to_eigen_vector(jg["upper"].get<std::vector<double>>());
      }
      config.grid = grid;
    }
    config.branin_points_per_dim =
        j.value("branin_points_per_dim", config.branin_points_per_dim);
    config.eps_ucb = j.value("eps_ucb", config.eps_ucb);
    if (j.contains("lipschitz") && !j["lipschitz"].is_null()) {
      config.lipschitz = j["lipschitz"].get<double>();
    }
    config.jobs = j.value("jobs", config.jobs);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("config json: ") + e.what());
  }
  return config;
}

inline bench::ExperimentConfig config_from_text(const std::string& text) {
  return config_from_json(parse_json(text, "config"));
}

// Per-iteration summary table: the po arm's rows first, then the baseline's.
inline std::string report_csv(const bench::ExperimentReport& report) {
  std::string out = "iteration,arm,mean_simple_regret,stderr\n";
  auto arm_rows = [&](const bench::ArmSummary& arm, const char* name) {
    for (Eigen::Index t = 0; t < arm.mean_simple.size(); ++t) {
      out += std::to_string(t + 1) + "," + name + "," +
             io::format_double(arm.mean_simple(t)) + "," +
             io::format_double(arm.stderr_simple(t)) + "\n";
    }
  };
  arm_rows(report.po, "po");
  arm_rows(report.baseline, "baseline");
  return out;
}

inline void write_report_csv(const bench::ExperimentReport& report,
                             const std::string& path) {
  io::atomic_write(path, report_csv(report));
}

// Full experiment metadata: the config echo, release diagnostics, derived
// constants, final-regret summaries both raw and in signal-deviation units,
// the exact invocation, and every seed needed to reproduce each run.
inline json report_to_json(const bench::ExperimentReport& report,
                           const std::vector<std::string>& invocation) {
  json j;
  j["config"] = config_to_json(report.config);
  j["release"] = {{"sigma_min", report.sigma_min},
                  {"omega", report.omega},
                  {"lifted", report.lifted}};
  j["dominance_fraction"] = report.dominance_fraction;
  j["hyper"] = hyper_to_json(report.hyper);
  j["constants"] = report.constants.has_value()
                       ? constants_to_json(*report.constants)
                       : json(nullptr);
  const double sigma_y = std::sqrt(report.hyper.signal_variance);
  const Eigen::Index last = report.po.mean_simple.size() - 1;
  auto arm_summary = [&](const bench::ArmSummary& arm,
                         const std::vector<double>& per_run) {
    json s;
    s["final_simple_mean"] = arm.mean_simple(last);
    s["final_simple_stderr"] = arm.stderr_simple(last);
    s["normalized_final_simple_mean"] = arm.mean_simple(last) / sigma_y;
    s["normalized_final_simple_stderr"] = arm.stderr_simple(last) / sigma_y;
    s["per_run_final_simple"] = per_run;
    return s;
  };
  j["summary"] = {
      {"po", arm_summary(report.po, report.po_final_simple)},
      {"baseline",
       arm_summary(report.baseline, report.baseline_final_simple)}};
  j["invocation"] = invocation;
  json seeds;
  seeds["master_seed"] = report.config.master_seed;
  json per_run = json::array();
  for (int k = 0; k < report.config.runs; ++k) {
    const std::uint64_t kk = static_cast<std::uint64_t>(k);
    per_run.push_back(
        {{"run", k},
         {"objective",
          derive_seed(report.config.master_seed, kObjectiveStream, kk)},
         {"projection",
          derive_seed(report.config.master_seed, kProjectionStream, kk)},
         {"oracle",
          derive_seed(report.config.master_seed, kOracleStream, kk)}});
  }
  seeds["per_run"] = per_run;
  j["seeds"] = seeds;
  return j;
}

inline void write_report_json(const bench::ExperimentReport& report,
                              const std::vector<std::string>& invocation,
                              const std::string& path) {
  io::atomic_write(path, report_to_json(report, invocation).dump(2) + "\n");
}

inline std::string sweep_csv(const std::vector<bench::SweepRow>& rows) {
  std::string out = "r,epsilon,S_T_mean,S_T_stderr,lifted\n";
  for (const bench::SweepRow& row : rows) {
    out += std::to_string(row.r) + "," + io::format_double(row.epsilon) +
           "," + io::format_double(row.mean_simple) + "," +
           io::format_double(row.stderr_simple) + "," +
           (row.lifted ? "1" : "0") + "\n";
  }
  return out;
}

inline void write_sweep_csv(const std::vector<bench::SweepRow>& rows,
                            const std::string& path) {
  io::atomic_write(path, sweep_csv(rows));
}

}  // namespace pobo::serialize

#endif  // POBO_SERIALIZE_HPP_
