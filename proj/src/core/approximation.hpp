#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "core/wendland.hpp"

namespace gwfit {

enum class ApproxKind { Truncation, Bernstein, LinearInterp, Nugget };

// One of the four approximation schemes, indexed by a fidelity parameter m.
// Schedules are callables of m so custom sequences can be plugged in; the
// factory functions install the default schedules.
struct ApproxFamily {
  ApproxKind kind = ApproxKind::Truncation;

  std::function<double(int)> c_schedule;      // Truncation cut radius, increasing to inf
  std::function<double(int)> b_schedule;      // Bernstein window, -> inf with b_m = o(m)
  std::function<std::vector<double>(int)> knot_schedule;  // sorted, first 0, last M
  std::function<double(int)> delta_schedule;  // nugget size, >= 0 and non-increasing
  double support_cap = 0.0;                   // M >= beta_max (Bernstein/LinearInterp)
  std::shared_ptr<const ApproxFamily> inner;  // Nugget wraps this (null = exact family)

  // Defaults: C_m = sqrt(m) beta_max / 10, b_m = m^(2/3), N_m = m equispaced
  // knots, delta(m) = 1/m, M = 1.25 beta_max.
  static ApproxFamily truncation(double beta_max);
  static ApproxFamily bernstein(double beta_max);
  static ApproxFamily linear_interp(double beta_max);
  static ApproxFamily nugget(double beta_max,
                             std::shared_ptr<const ApproxFamily> inner = nullptr);

  void validate(int m) const;
};

// Family bound to a fidelity index and base parameters. Node/coefficient
// tables for the value are built at construction; tables for parameter
// derivatives are memoized thread-safely on first use.
class ApproxInstance {
 public:
  ApproxInstance(ApproxFamily family, int m, WendlandParams base,
                 QuadratureConfig quad = {});

  double eval(double t) const;
  double eval_dtheta(double t, const ParamOrder& order) const;

  // Radius beyond which eval is structurally zero.
  double support_radius() const;

  int m() const { return m_; }
  const WendlandParams& base() const { return base_; }
  const ApproxFamily& family() const { return fam_; }

 private:
  struct Table {
    std::vector<double> coef;  // at Bernstein nodes or interpolation knots
  };
  const Table& table_for(const ParamOrder& order) const;
  double eval_with(const Table& tbl, double t) const;
  double base_eval(const ParamOrder& order, double t) const;

  ApproxFamily fam_;
  int m_ = 1;
  WendlandParams base_;
  QuadratureConfig quad_;

  double cut_ = 0.0;                   // Truncation C_m
  double window_ = 0.0;                // Bernstein b_m
  std::vector<double> knots_;          // LinearInterp
  double delta_ = 0.0;                 // Nugget
  std::shared_ptr<const ApproxInstance> inner_;

  mutable std::mutex mu_;
  mutable std::map<std::pair<int, int>, Table> tables_;
};

// Structural support radius of the family at fidelity m and base range beta.
double family_support_radius(const ApproxFamily& family, int m, double beta);

// Grid lower bound on sup_{theta in box} sup_t |approx - exact| over a
// uniform t-grid on [0, max(M, beta_max)] and a 5x5 uniform theta-grid.
double sup_error(const ApproxFamily& family, int m, const SmoothnessConfig& smooth,
                 const ThetaBox& box, double grid_step,
                 const QuadratureConfig& quad = {});

}  // namespace gwfit
