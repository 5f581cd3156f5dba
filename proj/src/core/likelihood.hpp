#pragma once

#include <stdexcept>

#include "core/covmatrix.hpp"
#include "core/model.hpp"

namespace gwfit {

using Mat2 = Eigen::Matrix2d;

// Gradient/Hessian are requested on the positive-definite region only; the
// modified likelihood is defined everywhere but is differentiated only where
// the factorization is a genuine Cholesky.
class NotPositiveDefiniteError : public std::runtime_error {
 public:
  explicit NotPositiveDefiniteError(const std::string& what) : std::runtime_error(what) {}
};

struct LikelihoodContext {
  const SiteSet* sites = nullptr;
  Vec data;
  const RadialModel* model = nullptr;
  ThetaBox box;

  void validate() const {
    if (!sites || !model) throw std::invalid_argument("LikelihoodContext: missing sites/model");
    if (data.size() != sites->n)
      throw std::invalid_argument("LikelihoodContext: data length != number of sites");
    box.validate();
  }
};

struct LikelihoodEval {
  double value = 0.0;       // (log det_+ + quadratic form) / n, minimized by fitting
  double log_det_plus = 0.0;
  double quad_form = 0.0;
  bool was_pd = false;
};

struct TraceConfig {
  int exact_threshold = 2000;  // exact trace via solves up to this n
  int probes = 64;             // Hutchinson probes above it
  uint64_t seed = 0x7ace5;
};

// Truncated-modified log-likelihood (scaled by -2/n and sign-flipped, so
// smaller is better). force_indefinite_path routes through the
// eigendecomposition even for PD matrices.
LikelihoodEval eval_loglik(const LikelihoodContext& ctx, const Theta& theta,
                           bool force_indefinite_path = false);

// Gradient of eval_loglik in theta; requires the covariance at theta to be
// positive-definite (throws NotPositiveDefiniteError otherwise).
Theta eval_score(const LikelihoodContext& ctx, const Theta& theta, TraceConfig tc = {});

// Hessian of eval_loglik in theta on the positive-definite region.
Mat2 eval_hessian(const LikelihoodContext& ctx, const Theta& theta, TraceConfig tc = {});

// Fisher-type matrix [tr(S^-1 dS_k S^-1 dS_l) / (2n)]; estimates the
// information limit whose inverse is the asymptotic covariance of the
// normalized estimation error.
Mat2 fisher_matrix(const LikelihoodContext& ctx, const Theta& theta, TraceConfig tc = {});

// (1/n) sum_{i,j} (k_theta - k_theta0)^2 over all site pairs; identifiability
// diagnostic, strictly positive for separated parameters at large n.
double identifiability_gap(const SiteSet& sites, const RadialModel& model,
                           const Theta& theta, const Theta& theta0);

}  // namespace gwfit
