#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "gnls/bounds.hpp"
#include "gnls/decay_fit.hpp"
#include "gnls/dynamics.hpp"
#include "gnls/kernels.hpp"
#include "gnls/measures.hpp"

namespace gnls {

inline constexpr int kSchemaVersion = 1;

struct ExperimentConfig {
  std::string kind = "relaxation";  // stationarity | relaxation | bound_comparison | lambda_scaling
  std::string id = "run";
  ModelParams model;
  int modes = 8;
  std::size_t ensemble = 1000;
  SimConfig sim;
  /// Names to fit or test. "mode(k)" is the complex mean of coefficient k;
  /// anything else is an observable name accepted by Observable::parse.
  std::vector<std::string> targets = {"mode(0)", "l2sq", "hamiltonian"};
  std::string initial = "point";  // free | gibbs | point
  /// Point initial data: c_k = sqrt(point_l2sq * v_k / sum v), v_k the free variances.
  double point_l2sq = 0.3;
  ChainConfig chain;
  int chains = 16;
  int equilibrium_per_chain = 2000;
  BoundOptions bounds;
  std::vector<double> lambdas;          // lambda_scaling
  std::vector<double> check_times = {5.0, 10.0};  // stationarity
  FitSettings fit;
  std::size_t csv_trajectories = 20;    // per-trajectory rows written to the CSV
  std::filesystem::path out_dir;
  Exec exec = Exec::parallel;

  void validate() const;
};

/// Builds a config from parsed TOML: [experiment], [model], [sim], [chain], [bounds], [fit].
ExperimentConfig read_experiment(const nlohmann::json& root, ExperimentConfig base = {});

struct ExperimentReport {
  nlohmann::json summary;
  bool passed = false;
};

/// Runs the experiment; when out_dir is set, writes <id>.csv and <id>.json there.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Point initial field used by experiments.
SpectralField point_initial(const ModelParams& mp, int N, double l2sq_target);

struct EquilibriumEstimate {
  std::vector<double> mean, se;  // per observable
  double acceptance = 0;
};

/// Equilibrium means from independent MALA chains; se from the spread of chain means.
EquilibriumEstimate equilibrium_means(const ModelParams& mp, int N, const std::vector<Observable>& obs,
                                      const ChainConfig& cc, int chains, int per_chain, Exec exec);

/// Slope of log(-log(C_final / C0)) against log lambda by least squares.
double scaling_exponent(const std::vector<double>& lambdas, const std::vector<double>& log_ratio);

}  // namespace gnls
