#pragma once

#include <string>
#include <vector>

#include "core/likelihood.hpp"

namespace gwfit {

enum class Optimizer { Hybrid, SimplexOnly };

struct FitConfig {
  int starts = 5;
  int max_iters = 300;
  double grad_tol = 1e-6;
  double step_tol = 1e-10;
  Optimizer optimizer = Optimizer::Hybrid;

  void validate() const {
    if (starts < 1) throw std::invalid_argument("FitConfig: starts must be >= 1");
    if (max_iters < 1) throw std::invalid_argument("FitConfig: max_iters must be >= 1");
  }
};

struct TracePoint {
  int iter = 0;
  Theta theta = Theta::Zero();
  double value = 0.0;
  bool pd = false;
};

struct FitResult {
  Theta theta_hat = Theta::Zero();
  double objective = 0.0;
  Mat2 fisher_at_hat = Mat2::Zero();
  Mat2 asymp_cov = Mat2::Zero();  // fisher^-1 / n
  int n_used = 0;
  bool converged = false;
  double pd_fraction = 0.0;         // share of objective evaluations that were PD
  bool flat_axis[2] = {false, false};  // near-zero information along an axis
  std::vector<TracePoint> trace;

  std::string to_json() const;
};

// Multi-start box-constrained minimization of the truncated-modified
// log-likelihood: derivative-free simplex while evaluations hit indefinite
// matrices, projected BFGS with the analytic score in the PD region. Ties
// across starts break by objective, then lexicographically in theta.
FitResult fit(const LikelihoodContext& ctx, const FitConfig& cfg);

struct ConfidenceRegion {
  Theta center = Theta::Zero();
  Mat2 shape = Mat2::Zero();   // n * fisher_at_hat; region is (t-c)' shape (t-c) <= threshold
  double threshold = 0.0;      // chi-square quantile, 2 dof
  double level = 0.0;
  double semi_axis[2] = {0.0, 0.0};
  double angle = 0.0;          // orientation of the first axis, radians
  double area = 0.0;

  bool contains(const Theta& theta) const {
    const Theta d = theta - center;
    return d.dot(shape * d) <= threshold + 1e-12;
  }
};

// Asymptotic ellipse {theta : n (theta - theta_hat)' fisher (theta - theta_hat)
// <= chi2_{2, level}}.
ConfidenceRegion confidence_region(const FitResult& res, double level);

}  // namespace gwfit
