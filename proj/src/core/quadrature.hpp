#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace gwfit {

struct QuadratureConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_subdivisions = 512;

  void validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0))
      throw std::invalid_argument("QuadratureConfig: tolerances must be positive");
    if (max_subdivisions < 1)
      throw std::invalid_argument("QuadratureConfig: max_subdivisions must be >= 1");
  }
};

// Raised when an iterative/numeric routine cannot reach the requested
// tolerance; carries the error estimate that was actually achieved.
class ToleranceError : public std::runtime_error {
 public:
  ToleranceError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved_error() const noexcept { return achieved_; }

 private:
  double achieved_;
};

// Adaptive Gauss-Kronrod 7-15 on [a, b]. A single non-adaptive panel is
// tried first (the common case for smooth integrands); subdivision is by
// bisection, so max_subdivisions maps to a recursion depth of
// log2(max_subdivisions).
template <class F>
double integrate(F&& f, double a, double b, const QuadratureConfig& cfg) {
  if (a == b) return 0.0;
  using rule = boost::math::quadrature::gauss_kronrod<double, 15>;
  double err = 0.0, l1 = 0.0;
  double val = rule::integrate(f, a, b, 0, cfg.rel_tol, &err, &l1);
  if (err <= std::max(cfg.abs_tol, cfg.rel_tol * std::abs(val))) return val;

  unsigned depth = 1;
  while ((1u << depth) < static_cast<unsigned>(cfg.max_subdivisions) && depth < 30) ++depth;
  val = rule::integrate(f, a, b, depth, cfg.rel_tol, &err, &l1);
  if (err > std::max(cfg.abs_tol, cfg.rel_tol * std::abs(val))) {
    throw ToleranceError("quadrature did not converge within " +
                             std::to_string(cfg.max_subdivisions) +
                             " subdivisions (error estimate " + std::to_string(err) + ")",
                         err);
  }
  return val;
}

}  // namespace gwfit
