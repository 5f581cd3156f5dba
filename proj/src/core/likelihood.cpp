#include "core/likelihood.hpp"

#include <cmath>

#include "core/celllist.hpp"
#include "core/rng.hpp"

namespace gwfit {

namespace {

SymMatrix assemble_value(const LikelihoodContext& ctx, const BoundKernels& bk) {
  return assemble(*ctx.sites, bk.value, bk.support);
}

Factorization pd_factor_or_throw(const LikelihoodContext& ctx, const Theta& theta,
                                 const BoundKernels& bk, SymMatrix& sigma_out) {
  sigma_out = assemble_value(ctx, bk);
  Factorization f = factorize(sigma_out);
  if (!f.is_pd())
    throw NotPositiveDefiniteError(
        "covariance (approximation) matrix is not positive-definite at the requested theta");
  return f;
}

// Derivative matrix in theta_k; reuses the assembled covariance when the
// model is linear in the variance parameter.
SymMatrix assemble_d1(const LikelihoodContext& ctx, const BoundKernels& bk,
                      const SymMatrix& sigma, const Theta& theta, int k) {
  if (k == 0 && ctx.model->linear_in_variance()) {
    SymMatrix d = sigma;
    d.mat *= 1.0 / theta[0];
    return d;
  }
  return assemble(*ctx.sites, bk.d1[k], bk.support);
}

// tr(S^-1 D): exact column solves at desk scale, Hutchinson above.
double trace_inv_times(const Factorization& f, const SymMatrix& d, const TraceConfig& tc) {
  const int n = f.size();
  if (n <= tc.exact_threshold) {
    const Eigen::MatrixXd x = f.solve_dense(Eigen::MatrixXd(d.mat));
    return x.trace();
  }
  const CounterRng rng(tc.seed, 3);
  double acc = 0.0;
  for (int p = 0; p < tc.probes; ++p) {
    Vec v(n);
    for (int i = 0; i < n; ++i)
      v[i] = rng.uniform01(static_cast<uint64_t>(p) * n + i) < 0.5 ? -1.0 : 1.0;
    acc += v.dot(f.apply_pinv(d.mat * v));
  }
  return acc / tc.probes;
}

}  // namespace

LikelihoodEval eval_loglik(const LikelihoodContext& ctx, const Theta& theta,
                           bool force_indefinite_path) {
  ctx.validate();
  if (!ctx.box.contains(theta[0], theta[1]))
    throw std::invalid_argument("eval_loglik: theta outside the parameter box");
  const BoundKernels bk = ctx.model->bind(theta, 0);
  const SymMatrix sigma = assemble_value(ctx, bk);
  const Factorization f = factorize(sigma, /*pd_attempt_first=*/!force_indefinite_path);
  LikelihoodEval out;
  out.was_pd = f.is_pd();
  out.log_det_plus = f.log_det_plus();
  out.quad_form = ctx.data.dot(f.apply_pinv(ctx.data));
  out.value = (out.log_det_plus + out.quad_form) / ctx.sites->n;
  return out;
}

Theta eval_score(const LikelihoodContext& ctx, const Theta& theta, TraceConfig tc) {
  ctx.validate();
  const int n = ctx.sites->n;
  const BoundKernels bk = ctx.model->bind(theta, 1);
  SymMatrix sigma;
  const Factorization f = pd_factor_or_throw(ctx, theta, bk, sigma);
  const Vec a = f.apply_pinv(ctx.data);
  Theta g;
  for (int k = 0; k < 2; ++k) {
    const SymMatrix dk = assemble_d1(ctx, bk, sigma, theta, k);
    const double tr = trace_inv_times(f, dk, tc);
    g[k] = (tr - a.dot(dk.mat * a)) / n;
  }
  return g;
}

Mat2 eval_hessian(const LikelihoodContext& ctx, const Theta& theta, TraceConfig tc) {
  ctx.validate();
  const int n = ctx.sites->n;
  const BoundKernels bk = ctx.model->bind(theta, 2);
  SymMatrix sigma;
  const Factorization f = pd_factor_or_throw(ctx, theta, bk, sigma);
  const Vec a = f.apply_pinv(ctx.data);

  SymMatrix d[2] = {assemble_d1(ctx, bk, sigma, theta, 0),
                    assemble_d1(ctx, bk, sigma, theta, 1)};
  Eigen::MatrixXd x[2];
  const bool exact = n <= tc.exact_threshold;
  if (exact)
    for (int k = 0; k < 2; ++k) x[k] = f.solve_dense(Eigen::MatrixXd(d[k].mat));

  Vec b[2] = {d[0].mat * a, d[1].mat * a};
  Vec c[2] = {f.apply_pinv(b[0]), f.apply_pinv(b[1])};

  Mat2 h;
  for (int k = 0; k < 2; ++k)
    for (int l = k; l < 2; ++l) {
      const SymMatrix d2 = assemble(*ctx.sites, bk.d2[d2_index(k, l)], bk.support);
      double tr_xx;
      if (exact) {
        tr_xx = x[k].cwiseProduct(x[l].transpose()).sum();
      } else {
        // tr(S^-1 Dk S^-1 Dl) by probing S^-1 Dk S^-1 Dl
        const CounterRng rng(tc.seed, 5);
        double acc = 0.0;
        for (int p = 0; p < tc.probes; ++p) {
          Vec v(n);
          for (int i = 0; i < n; ++i)
            v[i] = rng.uniform01(static_cast<uint64_t>(p) * n + i) < 0.5 ? -1.0 : 1.0;
          acc += v.dot(f.apply_pinv(d[k].mat * f.apply_pinv(d[l].mat * v)));
        }
        tr_xx = acc / tc.probes;
      }
      const double tr_d2 = trace_inv_times(f, d2, tc);
      const double quad = 2.0 * b[k].dot(c[l]) - a.dot(d2.mat * a);
      h(k, l) = h(l, k) = (-tr_xx + tr_d2 + quad) / n;
    }
  return h;
}

Mat2 fisher_matrix(const LikelihoodContext& ctx, const Theta& theta, TraceConfig tc) {
  ctx.validate();
  const int n = ctx.sites->n;
  const BoundKernels bk = ctx.model->bind(theta, 1);
  SymMatrix sigma;
  const Factorization f = pd_factor_or_throw(ctx, theta, bk, sigma);
  SymMatrix d[2] = {assemble_d1(ctx, bk, sigma, theta, 0),
                    assemble_d1(ctx, bk, sigma, theta, 1)};
  Mat2 h;
  if (n <= tc.exact_threshold) {
    Eigen::MatrixXd x[2] = {f.solve_dense(Eigen::MatrixXd(d[0].mat)),
                            f.solve_dense(Eigen::MatrixXd(d[1].mat))};
    for (int k = 0; k < 2; ++k)
      for (int l = k; l < 2; ++l)
        h(k, l) = h(l, k) = x[k].cwiseProduct(x[l].transpose()).sum() / (2.0 * n);
    return h;
  }
  const CounterRng rng(tc.seed, 7);
  for (int k = 0; k < 2; ++k)
    for (int l = k; l < 2; ++l) {
      double acc = 0.0;
      for (int p = 0; p < tc.probes; ++p) {
        Vec v(n);
        for (int i = 0; i < n; ++i)
          v[i] = rng.uniform01(static_cast<uint64_t>(p) * n + i) < 0.5 ? -1.0 : 1.0;
        acc += v.dot(f.apply_pinv(d[k].mat * f.apply_pinv(d[l].mat * v)));
      }
      h(k, l) = h(l, k) = acc / tc.probes / (2.0 * n);
    }
  return h;
}

double identifiability_gap(const SiteSet& sites, const RadialModel& model,
                           const Theta& theta, const Theta& theta0) {
  const BoundKernels bk = model.bind(theta, 0);
  const BoundKernels bk0 = model.bind(theta0, 0);
  const double support = std::max(bk.support, bk0.support);
  const double diag = bk.value(0.0) - bk0.value(0.0);
  double acc = sites.n * diag * diag;

  auto add_pair = [&](int, int, double dist) {
    const double dv = bk.value(dist) - bk0.value(dist);
    acc += 2.0 * dv * dv;
  };
  if (sites.n > 1 && sites.dim <= CellList::kMaxDim) {
    const CellList cl(sites, support);
    cl.for_pairs_within(support, add_pair);
  } else if (sites.n > 1) {
    for (int i = 0; i < sites.n; ++i)
      for (int j = i + 1; j < sites.n; ++j) {
        const double dist = sites.distance(i, j);
        if (dist < support) add_pair(i, j, dist);
      }
  }
  return acc / sites.n;
}

}  // namespace gwfit
