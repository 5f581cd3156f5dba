#include "core/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "core/errors.hpp"
#include "core/stats.hpp"

namespace gwfit {

namespace {

struct Evaluator {
  const LikelihoodContext& ctx;
  long n_evals = 0;
  long n_pd = 0;

  double operator()(const Theta& theta, bool* pd_out = nullptr) {
    const LikelihoodEval e = eval_loglik(ctx, theta);
    ++n_evals;
    if (e.was_pd) ++n_pd;
    if (pd_out) *pd_out = e.was_pd;
    return e.value;
  }
};

Theta clip_to_box(const ThetaBox& box, Theta t) {
  t[0] = std::clamp(t[0], box.sigma2_min, box.sigma2_max);
  t[1] = std::clamp(t[1], box.beta_min, box.beta_max);
  return t;
}

struct LocalResult {
  Theta theta = Theta::Zero();
  double value = std::numeric_limits<double>::infinity();
  bool converged = false;
};

// Nelder-Mead restricted to the box (candidates are clipped). Runs until the
// simplex is small, the iteration budget is exhausted, or -- in hybrid mode --
// all vertices sit in the PD region.
LocalResult simplex_phase(Evaluator& ev, const ThetaBox& box, const Theta& start,
                          const FitConfig& cfg, bool stop_when_pd,
                          std::vector<TracePoint>& trace, bool* all_pd_out) {
  const double hs = 0.1 * (box.sigma2_max - box.sigma2_min);
  const double hb = 0.1 * (box.beta_max - box.beta_min);
  std::array<Theta, 3> v = {start, clip_to_box(box, start + Theta(hs, 0.0)),
                            clip_to_box(box, start + Theta(0.0, hb))};
  // degenerate simplex at a box corner: step inward instead
  if ((v[1] - v[0]).norm() < 1e-14) v[1] = clip_to_box(box, start - Theta(hs, 0.0));
  if ((v[2] - v[0]).norm() < 1e-14) v[2] = clip_to_box(box, start - Theta(0.0, hb));

  std::array<double, 3> f;
  std::array<bool, 3> pd;
  for (int i = 0; i < 3; ++i) f[i] = ev(v[i], &pd[i]);

  const double diam_tol = 1e-9 * (1.0 + (box.sigma2_max - box.sigma2_min) +
                                  (box.beta_max - box.beta_min));
  LocalResult out;
  for (int it = 0; it < cfg.max_iters; ++it) {
    std::array<int, 3> ord = {0, 1, 2};
    std::sort(ord.begin(), ord.end(), [&](int a, int b) { return f[a] < f[b]; });
    const int lo = ord[0], mid = ord[1], hi = ord[2];
    trace.push_back({it, v[lo], f[lo], pd[lo]});

    if (stop_when_pd && pd[0] && pd[1] && pd[2]) {
      if (all_pd_out) *all_pd_out = true;
      break;
    }
    const double diam = std::max((v[lo] - v[hi]).norm(), (v[lo] - v[mid]).norm());
    if (diam < diam_tol || std::abs(f[hi] - f[lo]) < cfg.step_tol * (1.0 + std::abs(f[lo]))) {
      out.converged = true;
      break;
    }

    const Theta centroid = 0.5 * (v[lo] + v[mid]);
    const Theta refl = clip_to_box(box, centroid + (centroid - v[hi]));
    bool pd_r;
    const double fr = ev(refl, &pd_r);
    if (fr < f[lo]) {
      const Theta exp_pt = clip_to_box(box, centroid + 2.0 * (centroid - v[hi]));
      bool pd_e;
      const double fe = ev(exp_pt, &pd_e);
      if (fe < fr) { v[hi] = exp_pt; f[hi] = fe; pd[hi] = pd_e; }
      else { v[hi] = refl; f[hi] = fr; pd[hi] = pd_r; }
    } else if (fr < f[mid]) {
      v[hi] = refl; f[hi] = fr; pd[hi] = pd_r;
    } else {
      const Theta contr = clip_to_box(box, centroid + 0.5 * (v[hi] - centroid));
      bool pd_c;
      const double fc = ev(contr, &pd_c);
      if (fc < f[hi]) { v[hi] = contr; f[hi] = fc; pd[hi] = pd_c; }
      else {  // shrink toward the best vertex
        for (int i : {mid, hi}) {
          v[i] = clip_to_box(box, v[lo] + 0.5 * (v[i] - v[lo]));
          f[i] = ev(v[i], &pd[i]);
        }
      }
    }
  }
  const int best = static_cast<int>(std::min_element(f.begin(), f.end()) - f.begin());
  out.theta = v[best];
  out.value = f[best];
  return out;
}

// Projected BFGS with Armijo backtracking; gradients come from the analytic
// score, so any indefinite trial point just shortens the step.
LocalResult bfgs_phase(Evaluator& ev, const LikelihoodContext& ctx, const Theta& start,
                       const FitConfig& cfg, std::vector<TracePoint>& trace) {
  const ThetaBox& box = ctx.box;
  LocalResult out;
  Theta x = clip_to_box(box, start);
  bool pd0;
  double fx = ev(x, &pd0);
  if (!pd0) { out.theta = x; out.value = fx; return out; }

  Theta g = eval_score(ctx, x);
  Mat2 h_inv = Mat2::Identity();
  out.theta = x;
  out.value = fx;
  for (int it = 0; it < cfg.max_iters; ++it) {
    trace.push_back({it, x, fx, true});
    const Theta pg = x - clip_to_box(box, x - g);
    if (pg.norm() < cfg.grad_tol) { out.converged = true; break; }

    Theta dir = -h_inv * g;
    if (dir.dot(g) > 0.0) dir = -g;  // fallback to steepest descent
    double step = 1.0;
    Theta xn = x;
    double fn = fx;
    bool accepted = false, pd_n = false;
    for (int ls = 0; ls < 40; ++ls) {
      xn = clip_to_box(box, x + step * dir);
      if ((xn - x).norm() < cfg.step_tol) break;
      fn = ev(xn, &pd_n);
      if (pd_n && fn <= fx + 1e-4 * (xn - x).dot(g)) { accepted = true; break; }
      step *= 0.5;
    }
    if (!accepted) { out.converged = (x - clip_to_box(box, x - g)).norm() < 10 * cfg.grad_tol; break; }

    const Theta gn = eval_score(ctx, xn);
    const Theta s = xn - x, y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const Mat2 eye = Mat2::Identity();
      h_inv = (eye - s * y.transpose() / sy) * h_inv * (eye - y * s.transpose() / sy) +
              s * s.transpose() / sy;
    } else {
      h_inv = Mat2::Identity();
    }
    x = xn; fx = fn; g = gn;
    if (fx <= out.value) { out.theta = x; out.value = fx; }
  }
  if (fx <= out.value) { out.theta = x; out.value = fx; }
  return out;
}

bool theta_less(const Theta& a, const Theta& b) {
  if (a[0] != b[0]) return a[0] < b[0];
  return a[1] < b[1];
}

}  // namespace

FitResult fit(const LikelihoodContext& ctx, const FitConfig& cfg) {
  ctx.validate();
  cfg.validate();
  const ThetaBox& box = ctx.box;

  std::vector<Theta> starts = {
      {0.5 * (box.sigma2_min + box.sigma2_max), 0.5 * (box.beta_min + box.beta_max)},
      {box.sigma2_min, box.beta_min},
      {box.sigma2_max, box.beta_max},
      {box.sigma2_min, box.beta_max},
      {box.sigma2_max, box.beta_min}};
  while (static_cast<int>(starts.size()) < cfg.starts) {
    // deterministic interior fill beyond the corner-midpoint pattern
    const size_t k = starts.size();
    const double a = 0.5 + 0.5 * std::sin(2.7 * static_cast<double>(k));
    const double b = 0.5 + 0.5 * std::cos(1.3 * static_cast<double>(k));
    starts.push_back({box.sigma2_min + a * (box.sigma2_max - box.sigma2_min),
                      box.beta_min + b * (box.beta_max - box.beta_min)});
  }
  starts.resize(cfg.starts);

  Evaluator ev{ctx};
  FitResult res;
  res.n_used = ctx.sites->n;
  bool have_best = false;
  LocalResult best;
  for (const Theta& s0 : starts) {
    bool simplex_ended_pd = ctx.model->pd_guaranteed();
    LocalResult stage;
    if (cfg.optimizer == Optimizer::Hybrid && simplex_ended_pd) {
      stage.theta = clip_to_box(box, s0);  // exact families skip straight to BFGS
    } else {
      stage = simplex_phase(ev, box, clip_to_box(box, s0), cfg,
                            cfg.optimizer == Optimizer::Hybrid, res.trace, &simplex_ended_pd);
    }
    LocalResult final_stage = stage;
    if (cfg.optimizer == Optimizer::Hybrid) {
      const LocalResult b = bfgs_phase(ev, ctx, stage.theta, cfg, res.trace);
      if (b.value <= stage.value || stage.value == std::numeric_limits<double>::infinity())
        final_stage = b;
    }
    if (!std::isfinite(final_stage.value)) continue;
    if (!have_best || final_stage.value < best.value ||
        (final_stage.value == best.value && theta_less(final_stage.theta, best.theta))) {
      best = final_stage;
      have_best = true;
    }
  }
  if (!have_best) throw NumericError("fit: no start produced a finite objective");

  res.theta_hat = best.theta;
  res.objective = best.value;
  res.converged = best.converged;
  res.pd_fraction = ev.n_evals > 0 ? static_cast<double>(ev.n_pd) / ev.n_evals : 0.0;
  try {
    res.fisher_at_hat = fisher_matrix(ctx, res.theta_hat);
    const double scale = res.fisher_at_hat.diagonal().maxCoeff();
    for (int k = 0; k < 2; ++k)
      res.flat_axis[k] = !(res.fisher_at_hat(k, k) > 1e-10 * std::max(1.0, scale));
    if (!res.flat_axis[0] && !res.flat_axis[1])
      res.asymp_cov = res.fisher_at_hat.inverse() / res.n_used;
  } catch (const NotPositiveDefiniteError&) {
    res.flat_axis[0] = res.flat_axis[1] = true;
  }
  return res;
}

ConfidenceRegion confidence_region(const FitResult& res, double level) {
  if (!(level >= 0.0 && level < 1.0))
    throw std::invalid_argument("confidence_region: level must be in [0, 1)");
  if (!res.converged)
    throw std::invalid_argument("confidence_region: fit did not converge");
  const Eigen::SelfAdjointEigenSolver<Mat2> es(res.fisher_at_hat);
  if (!(es.eigenvalues().minCoeff() > 0.0))
    throw std::domain_error(
        "confidence_region: singular information matrix; check identifiability "
        "(identifiability_gap) before building a region");
  ConfidenceRegion cr;
  cr.center = res.theta_hat;
  cr.level = level;
  cr.shape = static_cast<double>(res.n_used) * res.fisher_at_hat;
  cr.threshold = chi2_quantile_2dof(level);
  // axes from the shape matrix: (t-c)' shape (t-c) = threshold
  const Eigen::SelfAdjointEigenSolver<Mat2> es2(cr.shape);
  for (int k = 0; k < 2; ++k)
    cr.semi_axis[k] = std::sqrt(cr.threshold / es2.eigenvalues()[k]);
  cr.angle = std::atan2(es2.eigenvectors()(1, 0), es2.eigenvectors()(0, 0));
  cr.area = cr.threshold > 0.0
                ? std::numbers::pi * cr.semi_axis[0] * cr.semi_axis[1]
                : 0.0;
  return cr;
}

std::string FitResult::to_json() const {
  std::ostringstream os;
  os.precision(17);
  os << "{\"theta_hat\":[" << theta_hat[0] << "," << theta_hat[1] << "]"
     << ",\"objective\":" << objective << ",\"n\":" << n_used
     << ",\"converged\":" << (converged ? "true" : "false")
     << ",\"pd_fraction\":" << pd_fraction
     << ",\"flat_axis\":[" << (flat_axis[0] ? "true" : "false") << ","
     << (flat_axis[1] ? "true" : "false") << "]"
     << ",\"fisher\":[[" << fisher_at_hat(0, 0) << "," << fisher_at_hat(0, 1) << "],["
     << fisher_at_hat(1, 0) << "," << fisher_at_hat(1, 1) << "]]"
     << ",\"cov\":[[" << asymp_cov(0, 0) << "," << asymp_cov(0, 1) << "],["
     << asymp_cov(1, 0) << "," << asymp_cov(1, 1) << "]]"
     << ",\"trace\":[";
  for (size_t i = 0; i < trace.size(); ++i) {
    if (i) os << ",";
    os << "{\"iter\":" << trace[i].iter << ",\"theta\":[" << trace[i].theta[0] << ","
       << trace[i].theta[1] << "],\"value\":" << trace[i].value
       << ",\"pd\":" << (trace[i].pd ? "true" : "false") << "}";
  }
  os << "]}";
  return os.str();
}

}  // namespace gwfit
