#include "core/approximation.hpp"

#include <algorithm>
#include <cmath>

namespace gwfit {

ApproxFamily ApproxFamily::truncation(double beta_max) {
  ApproxFamily f;
  f.kind = ApproxKind::Truncation;
  f.c_schedule = [beta_max](int m) { return std::sqrt(static_cast<double>(m)) * beta_max / 10.0; };
  return f;
}

ApproxFamily ApproxFamily::bernstein(double beta_max) {
  ApproxFamily f;
  f.kind = ApproxKind::Bernstein;
  // Window M + m^(1/3): grows without bound, o(m), and never drops below the
  // support cap (the polynomial is always evaluated inside its window). The
  // induced smoothing bandwidth sqrt(t b_m / m) then decays like m^(-1/3);
  // windows growing as fast as m^(2/3) leave an m^(-1/6) bandwidth whose
  // range bias dominates the estimation error well past m = 400.
  const double cap = 1.25 * beta_max;
  f.b_schedule = [cap](int m) { return cap + std::cbrt(static_cast<double>(m)); };
  f.support_cap = cap;
  return f;
}

ApproxFamily ApproxFamily::linear_interp(double beta_max) {
  ApproxFamily f;
  f.kind = ApproxKind::LinearInterp;
  const double M = 1.25 * beta_max;
  f.support_cap = M;
  f.knot_schedule = [M](int m) {
    std::vector<double> k(m + 1);
    for (int i = 0; i <= m; ++i) k[i] = M * i / m;
    return k;
  };
  return f;
}

ApproxFamily ApproxFamily::nugget(double beta_max, std::shared_ptr<const ApproxFamily> inner) {
  ApproxFamily f;
  f.kind = ApproxKind::Nugget;
  f.support_cap = 1.25 * beta_max;
  f.delta_schedule = [](int m) { return 1.0 / m; };
  f.inner = std::move(inner);
  return f;
}

void ApproxFamily::validate(int m) const {
  if (m < 1) throw std::invalid_argument("ApproxFamily: m must be >= 1");
  switch (kind) {
    case ApproxKind::Truncation:
      if (!c_schedule) throw std::invalid_argument("ApproxFamily: missing c_schedule");
      if (!(c_schedule(m + 1) > c_schedule(m)))
        throw std::invalid_argument("ApproxFamily: C_m must be strictly increasing");
      break;
    case ApproxKind::Bernstein:
      if (!b_schedule) throw std::invalid_argument("ApproxFamily: missing b_schedule");
      if (!(b_schedule(m + 1) >= b_schedule(m)))
        throw std::invalid_argument("ApproxFamily: b_m must be monotone increasing");
      if (!(support_cap > 0.0)) throw std::invalid_argument("ApproxFamily: support_cap not set");
      break;
    case ApproxKind::LinearInterp: {
      if (!knot_schedule) throw std::invalid_argument("ApproxFamily: missing knot_schedule");
      const auto k = knot_schedule(m);
      if (k.size() < 2 || k.front() != 0.0 || !std::is_sorted(k.begin(), k.end()))
        throw std::invalid_argument("ApproxFamily: knots must be sorted with first = 0");
      if (!(support_cap > 0.0) || std::abs(k.back() - support_cap) > 1e-12 * support_cap)
        throw std::invalid_argument("ApproxFamily: last knot must equal the support cap M");
      break;
    }
    case ApproxKind::Nugget:
      if (!delta_schedule) throw std::invalid_argument("ApproxFamily: missing delta_schedule");
      if (delta_schedule(m) < 0.0 || delta_schedule(m + 1) > delta_schedule(m))
        throw std::invalid_argument("ApproxFamily: delta(m) must be >= 0 and non-increasing");
      break;
  }
}

ApproxInstance::ApproxInstance(ApproxFamily family, int m, WendlandParams base,
                               QuadratureConfig quad)
    : fam_(std::move(family)), m_(m), base_(base), quad_(quad) {
  base_.validate();
  fam_.validate(m_);
  switch (fam_.kind) {
    case ApproxKind::Truncation:
      cut_ = fam_.c_schedule(m_);
      break;
    case ApproxKind::Bernstein:
      window_ = fam_.b_schedule(m_);
      break;
    case ApproxKind::LinearInterp:
      knots_ = fam_.knot_schedule(m_);
      break;
    case ApproxKind::Nugget:
      delta_ = fam_.delta_schedule(m_);
      if (fam_.inner)
        inner_ = std::make_shared<const ApproxInstance>(*fam_.inner, m_, base_, quad_);
      break;
  }
  if (fam_.kind == ApproxKind::Bernstein || fam_.kind == ApproxKind::LinearInterp)
    table_for(ParamOrder{});  // value coefficients, built eagerly
}

double family_support_radius(const ApproxFamily& family, int m, double beta) {
  switch (family.kind) {
    case ApproxKind::Truncation: return std::min(family.c_schedule(m), beta);
    case ApproxKind::Bernstein: return family.support_cap;
    case ApproxKind::LinearInterp: return family.support_cap;
    case ApproxKind::Nugget:
      return family.inner ? family_support_radius(*family.inner, m, beta) : beta;
  }
  return beta;
}

double ApproxInstance::support_radius() const {
  return family_support_radius(fam_, m_, base_.beta);
}

double ApproxInstance::base_eval(const ParamOrder& order, double t) const {
  if (order.total() == 0) return eval_phi(base_, t, quad_);
  return eval_dphi(base_, t, order, quad_);
}

const ApproxInstance::Table& ApproxInstance::table_for(const ParamOrder& order) const {
  std::lock_guard<std::mutex> lock(mu_);
  const auto key = std::make_pair(order.d_sigma2, order.d_beta);
  auto it = tables_.find(key);
  if (it != tables_.end()) return it->second;

  Table tbl;
  if (fam_.kind == ApproxKind::Bernstein) {
    tbl.coef.resize(m_ + 1, 0.0);
    for (int k = 0; k <= m_; ++k) {
      const double node = window_ * k / m_;
      if (node >= base_.beta) break;  // base function and derivatives vanish
      tbl.coef[k] = base_eval(order, node);
    }
  } else if (fam_.kind == ApproxKind::LinearInterp) {
    tbl.coef.resize(knots_.size(), 0.0);
    for (size_t k = 0; k < knots_.size(); ++k) {
      if (knots_[k] >= base_.beta) continue;
      tbl.coef[k] = base_eval(order, knots_[k]);
    }
  }
  return tables_.emplace(key, std::move(tbl)).first->second;
}

// Bernstein sum with the binomial weights generated around the mode in log
// space; weights further than ~sqrt(50) standard deviations contribute below
// 1e-21 of the total and are skipped.
double ApproxInstance::eval_with(const Table& tbl, double t) const {
  const double p = t / window_;
  if (p <= 0.0) return tbl.coef[0];
  if (p == 1.0) return tbl.coef[m_];
  if (p < 1.0) {
    const double mean = m_ * p, sd = std::sqrt(m_ * p * (1.0 - p));
    const int lo = std::max(0, static_cast<int>(std::floor(mean - 10.0 * sd - 5.0)));
    const int hi = std::min(m_, static_cast<int>(std::ceil(mean + 10.0 * sd + 5.0)));
    // binomial weights by recurrence from the window start (weights outside
    // the window are below ~1e-21 of the peak)
    double w = std::exp(std::lgamma(m_ + 1.0) - std::lgamma(lo + 1.0) -
                        std::lgamma(m_ - lo + 1.0) + lo * std::log(p) +
                        (m_ - lo) * std::log1p(-p));
    const double odds = p / (1.0 - p);
    double sum = 0.0;
    for (int k = lo; k <= hi; ++k) {
      sum += tbl.coef[k] * w;
      w *= odds * (m_ - k) / (k + 1.0);
    }
    return sum;
  }
  // t > b_m (only when the support cap exceeds the Bernstein window): the
  // polynomial is still defined; sum signed terms in log magnitude.
  const double lp = std::log(p), lq = std::log(p - 1.0);
  double sum = 0.0;
  for (int k = 0; k <= m_; ++k) {
    if (tbl.coef[k] == 0.0) continue;
    const double lmag = std::lgamma(m_ + 1.0) - std::lgamma(k + 1.0) -
                        std::lgamma(m_ - k + 1.0) + k * lp + (m_ - k) * lq;
    const double sgn = ((m_ - k) % 2 == 0) ? 1.0 : -1.0;
    sum += sgn * tbl.coef[k] * std::exp(lmag);
  }
  return sum;
}

double ApproxInstance::eval(double t) const { return eval_dtheta(t, ParamOrder{}); }

double ApproxInstance::eval_dtheta(double t, const ParamOrder& order) const {
  if (t < 0.0) throw std::invalid_argument("ApproxInstance: t must be >= 0");
  switch (fam_.kind) {
    case ApproxKind::Truncation:
      if (t > cut_) return 0.0;
      return base_eval(order, t);
    case ApproxKind::Bernstein: {
      if (t > fam_.support_cap) return 0.0;
      return eval_with(table_for(order), t);
    }
    case ApproxKind::LinearInterp: {
      if (t > fam_.support_cap) return 0.0;
      const auto& tbl = table_for(order);
      const auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
      if (it == knots_.begin()) return tbl.coef.front();
      if (it == knots_.end()) return tbl.coef.back();
      const size_t k = static_cast<size_t>(it - knots_.begin()) - 1;
      const double t0 = knots_[k], t1 = knots_[k + 1];
      const double w = (t1 > t0) ? (t - t0) / (t1 - t0) : 0.0;
      return tbl.coef[k] + w * (tbl.coef[k + 1] - tbl.coef[k]);
    }
    case ApproxKind::Nugget: {
      const double v = inner_ ? inner_->eval_dtheta(t, order) : base_eval(order, t);
      // delta is theta-independent, so it only enters the value at the origin
      return (t == 0.0 && order.total() == 0) ? v + delta_ : v;
    }
  }
  return 0.0;
}

double sup_error(const ApproxFamily& family, int m, const SmoothnessConfig& smooth,
                 const ThetaBox& box, double grid_step, const QuadratureConfig& quad) {
  if (!(grid_step > 0.0)) throw std::invalid_argument("sup_error: grid_step must be > 0");
  box.validate();
  const double tmax = std::max(family.support_cap, box.beta_max);
  const int nt = static_cast<int>(std::ceil(tmax / grid_step)) + 1;
  constexpr int kThetaGrid = 5;
  double worst = 0.0;
  for (int a = 0; a < kThetaGrid; ++a)
    for (int b = 0; b < kThetaGrid; ++b) {
      WendlandParams p;
      p.sigma2 = box.sigma2_min + (box.sigma2_max - box.sigma2_min) * a / (kThetaGrid - 1);
      p.beta = box.beta_min + (box.beta_max - box.beta_min) * b / (kThetaGrid - 1);
      p.smooth = smooth;
      const ApproxInstance inst(family, m, p, quad);
      for (int i = 0; i < nt; ++i) {
        const double t = std::min(tmax, i * grid_step);
        worst = std::max(worst, std::abs(inst.eval(t) - eval_phi(p, t, quad)));
      }
    }
  return worst;
}

}  // namespace gwfit
