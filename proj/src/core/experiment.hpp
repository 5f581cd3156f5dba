#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/fit.hpp"
#include "core/simulate.hpp"
#include "core/taper.hpp"

namespace gwfit {

enum class ExperimentKind { Simulate, Fit, McConsistency, McNormality, KlStudy, ApproxError };

std::string kind_name(ExperimentKind k);
ExperimentKind kind_from_name(const std::string& name);

struct ModelSpec {
  double nu = 9.0;
  double kappa = 4.5;
  double sigma2 = 1.0;  // theta0
  double beta = 1.8;    // theta0
};

struct TaperStudySpec {
  double beta0 = 1.0;
  double nu = 5.0;
  double kappa = 3.0;
  std::string family = "linear-interp";  // approximation applied to the taper
  std::vector<int> m_sweep = {10, 100, 1000};
  MaternParams matern;    // data-generating Matern theta0
  int theta_grid = 25;    // KL scan resolution per axis
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Simulate;
  uint64_t seed = 1;
  int threads = 1;
  std::string out_dir = ".";
  std::string prefix = "study";

  GridSpec grid;
  ModelSpec model;
  ThetaBox theta_box{0.2, 3.0, 0.5, 4.0};
  std::vector<std::string> families = {"exact"};  // exact | truncation | bernstein | linear-interp | nugget
  int approx_m = 0;                               // 0 means m = r(n) = n
  std::vector<int> n_sweep;
  int replicates = 100;
  FitConfig fit_cfg;
  QuadratureConfig quad;

  // kind = fit
  std::string sites_csv, data_csv;
  int fit_replicate = 0;

  // kind = approx-error
  std::vector<int> m_sweep = {10, 50, 200, 1000};
  double grid_step = 0.0;  // 0 -> (1 - 2 tau) / 50

  TaperStudySpec taper;

  std::string to_json() const;
  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig load(const std::string& path);  // applies GWFIT_SEED / GWFIT_OUT
};

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

ValidationReport validate(const ExperimentConfig& cfg);

// Build the model named by `family` (m resolved as r(n) = n when approx_m = 0).
std::unique_ptr<RadialModel> make_family_model(const ExperimentConfig& cfg,
                                               const std::string& family, int n);

struct McFitOutcome {
  std::string family;
  int n = 0;
  int replicate = 0;
  bool ok = false;
  std::string error;
  Theta theta_hat = Theta::Zero();
  double objective = 0.0;
  bool converged = false;
  bool covered95 = false;
  double ellipse_stat = 0.0;  // n (theta_hat - theta0)' fisher (theta_hat - theta0)
  Eigen::Vector2d standardized = Eigen::Vector2d::Zero();  // sqrt(n) fisher^1/2 (theta_hat - theta0)
};

// One site realization per n (seeded grid.seed + n), simulated observations
// under theta0, one fit per (family, n, replicate). Deterministic in the
// config seed regardless of the thread count.
std::vector<McFitOutcome> run_mc_fits(const ExperimentConfig& cfg);

struct KlStudyResult {
  std::vector<int> m_sweep;
  std::vector<double> sup_gap;       // sup over theta grid of |d - d_approx| per m
  double d_at_fit = 0.0;             // d at the truncated-tapered estimate
  double d_grid_min = 0.0;
  double d_grid_max = 0.0;
  Theta theta_fit = Theta::Zero();
};

KlStudyResult run_kl_study(const ExperimentConfig& cfg);

// Runs the configured experiment, writing the per-replicate CSV, summary
// JSON, and plot-ready long CSV into out_dir. Returns a process exit code:
// 0 success, 2 invalid config, 3 numeric failures (per-replicate log written).
int run_experiment(const ExperimentConfig& cfg);
int run_experiment_file(const std::string& config_path);

}  // namespace gwfit
