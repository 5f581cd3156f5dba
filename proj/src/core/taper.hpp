#pragma once

#include <memory>
#include <optional>

#include "core/fit.hpp"

namespace gwfit {

// Half-integer Matern orders with closed forms; the base family for the
// tapering exercise (non-compact support, polynomial tail decay).
struct MaternParams {
  double sigma2 = 1.0;
  double range = 1.0;
  double smoothness = 1.5;  // one of 0.5, 1.5, 2.5

  void validate() const {
    if (!(sigma2 > 0.0) || !(range > 0.0))
      throw std::invalid_argument("MaternParams: sigma2 and range must be > 0");
    if (smoothness != 0.5 && smoothness != 1.5 && smoothness != 2.5)
      throw std::invalid_argument("MaternParams: smoothness must be one of 0.5, 1.5, 2.5");
  }
};

double matern_value(const MaternParams& p, double t);
double matern_dtheta(const MaternParams& p, double t, int k);          // theta = (sigma2, range)
double matern_d2theta(const MaternParams& p, double t, int k, int l);

// Fixed compactly supported taper: a generalized Wendland shape with range
// beta0, normalized to 1 at the origin. Optionally replaced by one of the
// functional approximation schemes at fidelity m.
struct TaperSpec {
  double beta0 = 1.0;
  SmoothnessConfig smooth;
  std::shared_ptr<const ApproxFamily> approx;  // null = exact taper
  int m = 1;

  void validate() const {
    if (!(beta0 > 0.0)) throw std::invalid_argument("TaperSpec: beta0 must be > 0");
    smooth.validate();
    if (!(smooth.kappa > 2.0))
      throw std::invalid_argument("TaperSpec: taper smoothness requires kappa > 2");
    if (approx && m < 1) throw std::invalid_argument("TaperSpec: m must be >= 1");
  }
};

// Evaluator of the (possibly approximated) taper, bound once.
std::function<double(double)> make_taper(const TaperSpec& spec,
                                         const QuadratureConfig& quad = {});

// Product kernel k_theta(t) * taper(t) at a single lag.
double tapered_kernel(const MaternParams& base, const TaperSpec& taper, double t,
                      const QuadratureConfig& quad = {});

// Matern model with a fixed multiplicative taper; theta = (sigma2, range).
class TaperedMaternModel : public RadialModel {
 public:
  TaperedMaternModel(double smoothness, TaperSpec taper, QuadratureConfig quad = {});
  BoundKernels bind(const Theta& theta, int max_order = 0) const override;
  double support_radius(const Theta&) const override { return taper_spec_.beta0; }
  // the product of two positive-definite functions stays positive-definite,
  // but an approximated taper loses the guarantee
  bool pd_guaranteed() const override { return taper_spec_.approx == nullptr; }
  bool linear_in_variance() const override { return true; }

 private:
  double smoothness_;
  TaperSpec taper_spec_;
  std::function<double(double)> taper_;
};

// Plain Matern model (no taper; dense covariance). Used as the data-generating
// model and for reference fits.
class MaternModel : public RadialModel {
 public:
  explicit MaternModel(double smoothness, double dense_radius = 1e9)
      : smoothness_(smoothness), radius_(dense_radius) {}
  BoundKernels bind(const Theta& theta, int max_order = 0) const override;
  double support_radius(const Theta&) const override { return radius_; }
  bool pd_guaranteed() const override { return true; }
  bool linear_in_variance() const override { return true; }

 private:
  double smoothness_;
  double radius_;
};

// Scaled conditional Kullback-Leibler divergence of the taper-misspecified
// Gaussian law from the true Matern law given the sites:
//   log det(R K^-1)/n + tr(K R^-1)/n - 1,
// with K the exact Matern matrix and R the tapered (or taper-approximated)
// matrix. Both must be positive-definite.
double kl_divergence(const SiteSet& sites, const MaternParams& data_model,
                     const MaternParams& taper_theta, const TaperSpec& taper,
                     const QuadratureConfig& quad = {});

// Truncated-tapered ML fit over theta = (sigma2, range) with the taper fixed.
FitResult fit_tapered(const SiteSet& sites, const Vec& data, double smoothness,
                      const TaperSpec& taper, const ThetaBox& box, const FitConfig& cfg,
                      const QuadratureConfig& quad = {});

}  // namespace gwfit
