#include "core/taper.hpp"

#include <cmath>

#include <Eigen/Cholesky>

namespace gwfit {

double matern_value(const MaternParams& p, double t) {
  p.validate();
  const double x = t / p.range;
  if (p.smoothness == 0.5) return p.sigma2 * std::exp(-x);
  if (p.smoothness == 1.5) {
    const double c = std::sqrt(3.0);
    return p.sigma2 * (1.0 + c * x) * std::exp(-c * x);
  }
  const double c = std::sqrt(5.0);
  return p.sigma2 * (1.0 + c * x + c * c * x * x / 3.0) * std::exp(-c * x);
}

double matern_dtheta(const MaternParams& p, double t, int k) {
  if (k == 0) return matern_value(p, t) / p.sigma2;
  const double x = t / p.range, rho = p.range;
  if (p.smoothness == 0.5) return p.sigma2 * std::exp(-x) * x / rho;
  if (p.smoothness == 1.5) {
    const double c = std::sqrt(3.0);
    return p.sigma2 * c * c * x * x * std::exp(-c * x) / rho;
  }
  const double c = std::sqrt(5.0);
  return p.sigma2 * c * c * x * x * (1.0 + c * x) * std::exp(-c * x) / (3.0 * rho);
}

double matern_d2theta(const MaternParams& p, double t, int k, int l) {
  if (k > l) std::swap(k, l);
  if (k == 0 && l == 0) return 0.0;
  if (k == 0 && l == 1) return matern_dtheta(p, t, 1) / p.sigma2;
  const double x = t / p.range, rho2 = p.range * p.range;
  if (p.smoothness == 0.5) return p.sigma2 * std::exp(-x) * x * (x - 2.0) / rho2;
  if (p.smoothness == 1.5) {
    const double c = std::sqrt(3.0);
    return p.sigma2 * c * c * x * x * std::exp(-c * x) * (c * x - 3.0) / rho2;
  }
  const double c = std::sqrt(5.0);
  return p.sigma2 * c * c * x * x * std::exp(-c * x) * (c * c * x * x - 3.0 * c * x - 3.0) /
         (3.0 * rho2);
}

std::function<double(double)> make_taper(const TaperSpec& spec, const QuadratureConfig& quad) {
  spec.validate();
  WendlandParams taper_params;
  taper_params.sigma2 = 1.0;  // normalized so the taper is 1 at the origin
  taper_params.beta = spec.beta0;
  taper_params.smooth = spec.smooth;
  if (!spec.approx) {
    return [taper_params, quad](double t) { return eval_phi(taper_params, t, quad); };
  }
  auto inst = std::make_shared<const ApproxInstance>(*spec.approx, spec.m, taper_params, quad);
  return [inst](double t) { return inst->eval(t); };
}

double tapered_kernel(const MaternParams& base, const TaperSpec& taper, double t,
                      const QuadratureConfig& quad) {
  if (t < 0.0) throw std::invalid_argument("tapered_kernel: t must be >= 0");
  return matern_value(base, t) * make_taper(taper, quad)(t);
}

TaperedMaternModel::TaperedMaternModel(double smoothness, TaperSpec taper,
                                       QuadratureConfig quad)
    : smoothness_(smoothness), taper_spec_(std::move(taper)) {
  taper_spec_.validate();
  taper_ = make_taper(taper_spec_, quad);
}

BoundKernels TaperedMaternModel::bind(const Theta& theta, int max_order) const {
  MaternParams p;
  p.sigma2 = theta[0];
  p.range = theta[1];
  p.smoothness = smoothness_;
  p.validate();
  const auto taper = taper_;
  BoundKernels b;
  b.support = taper_spec_.beta0;
  b.value = [p, taper](double t) { return matern_value(p, t) * taper(t); };
  if (max_order >= 1) {
    b.d1[0] = [p, taper](double t) { return matern_dtheta(p, t, 0) * taper(t); };
    b.d1[1] = [p, taper](double t) { return matern_dtheta(p, t, 1) * taper(t); };
  }
  if (max_order >= 2) {
    b.d2[0] = [](double) { return 0.0; };
    b.d2[1] = [p, taper](double t) { return matern_d2theta(p, t, 0, 1) * taper(t); };
    b.d2[2] = [p, taper](double t) { return matern_d2theta(p, t, 1, 1) * taper(t); };
  }
  return b;
}

BoundKernels MaternModel::bind(const Theta& theta, int max_order) const {
  MaternParams p;
  p.sigma2 = theta[0];
  p.range = theta[1];
  p.smoothness = smoothness_;
  p.validate();
  BoundKernels b;
  b.support = radius_;
  b.value = [p](double t) { return matern_value(p, t); };
  if (max_order >= 1) {
    b.d1[0] = [p](double t) { return matern_dtheta(p, t, 0); };
    b.d1[1] = [p](double t) { return matern_dtheta(p, t, 1); };
  }
  if (max_order >= 2) {
    b.d2[0] = [](double) { return 0.0; };
    b.d2[1] = [p](double t) { return matern_d2theta(p, t, 0, 1); };
    b.d2[2] = [p](double t) { return matern_d2theta(p, t, 1, 1); };
  }
  return b;
}

double kl_divergence(const SiteSet& sites, const MaternParams& data_model,
                     const MaternParams& taper_theta, const TaperSpec& taper,
                     const QuadratureConfig& quad) {
  data_model.validate();
  taper_theta.validate();
  const int n = sites.n;

  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i) {
    K(i, i) = data_model.sigma2;
    for (int j = i + 1; j < n; ++j)
      K(i, j) = K(j, i) = matern_value(data_model, sites.distance(i, j));
  }
  const Eigen::LLT<Eigen::MatrixXd> k_llt(K);
  if (k_llt.info() != Eigen::Success)
    throw NotPositiveDefiniteError("kl_divergence: exact covariance is not positive-definite");

  const auto tp = make_taper(taper, quad);
  const SymMatrix R = assemble(
      sites, [&](double t) { return matern_value(taper_theta, t) * tp(t); }, taper.beta0);
  const Factorization r_fac = factorize(R);
  if (!r_fac.is_pd())
    throw NotPositiveDefiniteError("kl_divergence: tapered covariance is not positive-definite");

  double log_det_k = 0.0;
  const auto& l = k_llt.matrixLLT();
  for (int i = 0; i < n; ++i) log_det_k += 2.0 * std::log(l(i, i));

  const double log_det_r = r_fac.log_det_plus();
  const double tr_kr = r_fac.solve_dense(K).trace();
  return (log_det_r - log_det_k) / n + tr_kr / n - 1.0;
}

FitResult fit_tapered(const SiteSet& sites, const Vec& data, double smoothness,
                      const TaperSpec& taper, const ThetaBox& box, const FitConfig& cfg,
                      const QuadratureConfig& quad) {
  const TaperedMaternModel model(smoothness, taper, quad);
  LikelihoodContext ctx;
  ctx.sites = &sites;
  ctx.data = data;
  ctx.model = &model;
  ctx.box = box;
  return fit(ctx, cfg);
}

}  // namespace gwfit
