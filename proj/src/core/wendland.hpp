#pragma once

#include <stdexcept>

#include "core/quadrature.hpp"

namespace gwfit {

// Fixed smoothness parameters of the generalized Wendland family. The pair
// (nu, kappa) is treated as known; only variance and range are estimated.
struct SmoothnessConfig {
  double nu = 0.0;
  double kappa = 0.0;
  int dim = 1;

  void validate() const {
    if (dim < 1) throw std::invalid_argument("SmoothnessConfig: dim must be >= 1");
    if (!(kappa > 0.0)) throw std::invalid_argument("SmoothnessConfig: kappa must be > 0");
    if (!(nu >= 0.5 * (dim + 1) + kappa))
      throw std::invalid_argument("SmoothnessConfig: need nu >= (dim+1)/2 + kappa");
  }
};

struct WendlandParams {
  double sigma2 = 1.0;  // variance, field-units^2
  double beta = 1.0;    // range, distance units
  SmoothnessConfig smooth;

  void validate() const {
    smooth.validate();
    if (!(sigma2 > 0.0)) throw std::invalid_argument("WendlandParams: sigma2 must be > 0");
    if (!(beta > 0.0)) throw std::invalid_argument("WendlandParams: beta must be > 0");
  }
};

// Compact parameter box for (sigma2, beta).
struct ThetaBox {
  double sigma2_min = 0.0, sigma2_max = 0.0;
  double beta_min = 0.0, beta_max = 0.0;

  void validate() const {
    if (!(0.0 < sigma2_min && sigma2_min < sigma2_max))
      throw std::invalid_argument("ThetaBox: need 0 < sigma2_min < sigma2_max");
    if (!(beta_min < beta_max))
      throw std::invalid_argument("ThetaBox: need beta_min < beta_max");
    if (!(beta_min > 0.0)) throw std::invalid_argument("ThetaBox: need beta_min > 0");
  }
  bool contains(double s2, double b) const {
    return s2 >= sigma2_min && s2 <= sigma2_max && b >= beta_min && b <= beta_max;
  }
};

// Partial-derivative multi-index over (sigma2, beta), total order <= 3.
struct ParamOrder {
  int d_sigma2 = 0;
  int d_beta = 0;
  int total() const { return d_sigma2 + d_beta; }
};

// Normalized base function on [0, 1): integral form with closed-form dispatch
// for integer kappa. Exactly 0 for r >= 1 and exactly 1 at r = 0.
double eval_phi_base(const SmoothnessConfig& smooth, double r,
                     const QuadratureConfig& quad = {});

// sigma2 * base(t / beta); support is [0, beta).
double eval_phi(const WendlandParams& params, double t,
                const QuadratureConfig& quad = {});

// Analytic partial derivative in (sigma2, beta), obtained by repeated
// differentiation under the integral sign. Orders in beta need kappa > d_beta
// for the lower-order factor functions to exist; classical validity of the
// interchange holds for kappa > d_beta + 1, and the formulas extend
// continuously down to kappa > d_beta.
double eval_dphi(const WendlandParams& params, double t, const ParamOrder& order,
                 const QuadratureConfig& quad = {});

// Isotropic spectral density of the kernel on R^dim, i.e. the (unnormalized)
// Fourier transform of s -> eval_phi(params, |s|), evaluated at |s| = s_norm.
// Strictly positive for valid parameters.
double spectral_density(const WendlandParams& params, double s_norm,
                        const QuadratureConfig& quad = {});

namespace detail {

// log Beta(a, b) via log-gamma, safe for large arguments.
double log_beta(double a, double b);

// The two evaluation routes behind eval_phi_base; exposed for cross-checks.
double phi_base_quadrature(double nu, double kappa, double r, const QuadratureConfig& quad);
double phi_base_closed_form(double nu, int kappa, double r);

// Base function without the Phi_d membership check (kappa > 0, nu > -1 only);
// needed for the kappa-j factor functions inside eval_dphi.
double phi_base_raw(double nu, double kappa, double r, const QuadratureConfig& quad);

// Truncated power series for the generalized hypergeometric 1F2.
double hyp1f2(double a, double b1, double b2, double z, double rel_tol);

// Numeric radial Fourier transform (Bessel-kernel quadrature) of eval_phi;
// continuation route for spectral_density at large arguments.
double spectral_density_numeric(const WendlandParams& params, double s_norm,
                                const QuadratureConfig& quad);

}  // namespace detail

}  // namespace gwfit
