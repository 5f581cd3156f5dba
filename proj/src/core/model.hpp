#pragma once

#include <array>
#include <functional>
#include <memory>

#include <Eigen/Dense>

#include "core/approximation.hpp"
#include "core/wendland.hpp"

namespace gwfit {

using Theta = Eigen::Vector2d;  // (sigma2, beta) or (sigma2, range)

// Radial covariance evaluators bound at a fixed parameter point. d1[k] is the
// partial in theta_k; d2 holds the upper triangle (0,0), (0,1), (1,1).
struct BoundKernels {
  std::function<double(double)> value;
  std::array<std::function<double(double)>, 2> d1;
  std::array<std::function<double(double)>, 3> d2;
  double support = 0.0;
};

inline int d2_index(int k, int l) { return (k == 0 && l == 0) ? 0 : (k == 1 && l == 1) ? 2 : 1; }

// A two-parameter radial covariance model; the covariance between sites at
// distance t under parameters theta is bind(theta).value(t).
class RadialModel {
 public:
  virtual ~RadialModel() = default;
  // max_order: 0 = value only, 1 = + gradient kernels, 2 = + second order
  virtual BoundKernels bind(const Theta& theta, int max_order = 0) const = 0;
  virtual double support_radius(const Theta& theta) const = 0;
  // true when the induced covariance matrix is positive-definite for every
  // site configuration (exact positive-definite families)
  virtual bool pd_guaranteed() const { return false; }
  // true when value(theta, t) = sigma2 * g(t; beta); exploited to obtain the
  // sigma2-derivative matrix as Sigma / sigma2 without a second assembly
  virtual bool linear_in_variance() const { return false; }
};

// Exact generalized Wendland family, theta = (sigma2, beta).
class WendlandModel : public RadialModel {
 public:
  explicit WendlandModel(SmoothnessConfig smooth, QuadratureConfig quad = {})
      : smooth_(smooth), quad_(quad) {
    smooth_.validate();
  }
  BoundKernels bind(const Theta& theta, int max_order = 0) const override;
  double support_radius(const Theta& theta) const override { return theta[1]; }
  bool pd_guaranteed() const override { return true; }
  bool linear_in_variance() const override { return true; }
  const SmoothnessConfig& smooth() const { return smooth_; }

 private:
  SmoothnessConfig smooth_;
  QuadratureConfig quad_;
};

// One of the four approximation families applied to the Wendland family;
// m is fixed at construction (callers set m = r(n)).
class ApproxModel : public RadialModel {
 public:
  ApproxModel(ApproxFamily family, int m, SmoothnessConfig smooth, QuadratureConfig quad = {})
      : family_(std::move(family)), m_(m), smooth_(smooth), quad_(quad) {
    smooth_.validate();
  }
  BoundKernels bind(const Theta& theta, int max_order = 0) const override;
  double support_radius(const Theta& theta) const override;
  // the truncation/Bernstein/interpolation operators are linear and scale
  // with sigma2; a nugget offset anywhere in the chain breaks that
  bool linear_in_variance() const override;
  int m() const { return m_; }

 private:
  ApproxFamily family_;
  int m_;
  SmoothnessConfig smooth_;
  QuadratureConfig quad_;
};

}  // namespace gwfit
