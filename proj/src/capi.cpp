#include "gwfit.h"

#include <cstring>
#include <memory>
#include <string>

#include "core/experiment.hpp"
#include "core/io.hpp"

using namespace gwfit;

namespace {

thread_local std::string g_last_error;

gwfit_status fail(gwfit_status code, const char* what) {
  g_last_error = what ? what : "unknown error";
  return code;
}

template <class F>
gwfit_status guard(F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    return fail(GWFIT_ERR_INVALID, e.what());
  } catch (const std::domain_error& e) {
    return fail(GWFIT_ERR_INVALID, e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(GWFIT_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(GWFIT_ERR_NUMERIC, e.what());
  }
}

// A model handle pairs a RadialModel with how theta maps into it.
struct ModelHandle {
  std::unique_ptr<RadialModel> model;
};

}  // namespace

struct gwfit_grid {
  SiteSet sites;
};

struct gwfit_model : ModelHandle {};

struct gwfit_fit_result {
  FitResult res;
};

extern "C" {

const char* gwfit_last_error(void) { return g_last_error.c_str(); }

const char* gwfit_version(void) { return "gwfit 1.0.0"; }

gwfit_status gwfit_grid_generate(int dim, double tau, int n, uint64_t seed,
                                 gwfit_grid** out) {
  if (!out) return fail(GWFIT_ERR_INVALID, "out is NULL");
  return guard([&] {
    GridSpec spec{dim, tau, n, seed};
    auto g = std::make_unique<gwfit_grid>();
    g->sites = generate(spec);
    *out = g.release();
    return GWFIT_OK;
  });
}

gwfit_status gwfit_grid_read_csv(const char* path, gwfit_grid** out) {
  if (!out || !path) return fail(GWFIT_ERR_INVALID, "NULL argument");
  return guard([&] {
    auto g = std::make_unique<gwfit_grid>();
    g->sites = read_sites_csv(path);
    *out = g.release();
    return GWFIT_OK;
  });
}

gwfit_status gwfit_grid_read_binary(const char* path, gwfit_grid** out) {
  if (!out || !path) return fail(GWFIT_ERR_INVALID, "NULL argument");
  return guard([&] {
    auto g = std::make_unique<gwfit_grid>();
    g->sites = read_sites_binary(path);
    *out = g.release();
    return GWFIT_OK;
  });
}

void gwfit_grid_free(gwfit_grid* g) { delete g; }

int gwfit_grid_size(const gwfit_grid* g) { return g ? g->sites.n : 0; }

int gwfit_grid_dim(const gwfit_grid* g) { return g ? g->sites.dim : 0; }

gwfit_status gwfit_grid_coords(const gwfit_grid* g, double* buf, size_t len) {
  if (!g || !buf) return fail(GWFIT_ERR_INVALID, "NULL argument");
  if (len < g->sites.coords.size())
    return fail(GWFIT_ERR_INVALID, "coords buffer too small");
  std::memcpy(buf, g->sites.coords.data(), g->sites.coords.size() * sizeof(double));
  return GWFIT_OK;
}

gwfit_status gwfit_grid_min_spacing(const gwfit_grid* g, double* out) {
  if (!g || !out) return fail(GWFIT_ERR_INVALID, "NULL argument");
  return guard([&] {
    *out = min_spacing(g->sites);
    return GWFIT_OK;
  });
}

gwfit_status gwfit_grid_write_csv(const gwfit_grid* g, const char* path) {
  if (!g || !path) return fail(GWFIT_ERR_INVALID, "NULL argument");
  return guard([&] {
    write_sites_csv(g->sites, path);
    return GWFIT_OK;
  });
}

gwfit_status gwfit_grid_write_binary(const gwfit_grid* g, const char* path) {
  if (!g || !path) return fail(GWFIT_ERR_INVALID, "NULL argument");
  return guard([&] {
    write_sites_binary(g->sites, path);
    return GWFIT_OK;
  });
}

gwfit_status gwfit_model_wendland(double nu, double kappa, int dim, gwfit_model** out) {
  if (!out) return fail(GWFIT_ERR_INVALID, "out is NULL");
  return guard([&] {
    auto h = std::make_unique<gwfit_model>();
    h->model = std::make_unique<WendlandModel>(SmoothnessConfig{nu, kappa, dim});
    *out = h.release();
    return GWFIT_OK;
  });
}

gwfit_status gwfit_model_wendland_approx(double nu, double kappa, int dim,
                                         const char* family, int m, double beta_max,
                                         gwfit_model** out) {
  if (!out || !family) return fail(GWFIT_ERR_INVALID, "NULL argument");
  return guard([&] {
    const std::string name(family);
    ApproxFamily fam;
    if (name == "truncation") fam = ApproxFamily::truncation(beta_max);
    else if (name == "bernstein") fam = ApproxFamily::bernstein(beta_max);
    else if (name == "linear-interp") fam = ApproxFamily::linear_interp(beta_max);
    else if (name == "nugget") fam = ApproxFamily::nugget(beta_max);
    else throw std::invalid_argument("unknown approximation family: " + name);
    auto h = std::make_unique<gwfit_model>();
    h->model = std::make_unique<ApproxModel>(std::move(fam), m,
                                             SmoothnessConfig{nu, kappa, dim});
    *out = h.release();
    return GWFIT_OK;
  });
}

gwfit_status gwfit_model_tapered_matern(double smoothness, double taper_beta0,
                                        double taper_nu, double taper_kappa, int dim,
                                        const char* taper_family, int taper_m,
                                        gwfit_model** out) {
  if (!out) return fail(GWFIT_ERR_INVALID, "out is NULL");
  return guard([&] {
    TaperSpec spec;
    spec.beta0 = taper_beta0;
    spec.smooth = SmoothnessConfig{taper_nu, taper_kappa, dim};
    if (taper_family) {
      const std::string name(taper_family);
      std::shared_ptr<const ApproxFamily> fam;
      if (name == "truncation")
        fam = std::make_shared<const ApproxFamily>(ApproxFamily::truncation(taper_beta0));
      else if (name == "bernstein")
        fam = std::make_shared<const ApproxFamily>(ApproxFamily::bernstein(taper_beta0));
      else if (name == "linear-interp")
        fam = std::make_shared<const ApproxFamily>(ApproxFamily::linear_interp(taper_beta0));
      else if (name == "nugget")
        fam = std::make_shared<const ApproxFamily>(ApproxFamily::nugget(taper_beta0));
      else
        throw std::invalid_argument("unknown taper approximation family: " + name);
      spec.approx = fam;
      spec.m = taper_m;
    }
    auto h = std::make_unique<gwfit_model>();
    h->model = std::make_unique<TaperedMaternModel>(smoothness, std::move(spec));
    *out = h.release();
    return GWFIT_OK;
  });
}

void gwfit_model_free(gwfit_model* m) { delete m; }

gwfit_status gwfit_model_value(const gwfit_model* m, double sigma2, double beta,
                               double t, double* out) {
  if (!m || !out) return fail(GWFIT_ERR_INVALID, "NULL argument");
  return guard([&] {
    *out = m->model->bind(Theta(sigma2, beta), 0).value(t);
    return GWFIT_OK;
  });
}

gwfit_status gwfit_wendland_value(double nu, double kappa, int dim, double sigma2,
                                  double beta, double t, double* out) {
  if (!out) return fail(GWFIT_ERR_INVALID, "out is NULL");
  return guard([&] {
    WendlandParams p{sigma2, beta, SmoothnessConfig{nu, kappa, dim}};
    *out = eval_phi(p, t);
    return GWFIT_OK;
  });
}

gwfit_status gwfit_wendland_spectral_density(double nu, double kappa, int dim,
                                             double sigma2, double beta, double s_norm,
                                             double* out) {
  if (!out) return fail(GWFIT_ERR_INVALID, "out is NULL");
  return guard([&] {
    WendlandParams p{sigma2, beta, SmoothnessConfig{nu, kappa, dim}};
    *out = spectral_density(p, s_norm);
    return GWFIT_OK;
  });
}

gwfit_status gwfit_simulate(const gwfit_grid* g, const gwfit_model* m, double sigma2,
                            double beta, int replicates, uint64_t seed, double* out,
                            size_t len) {
  if (!g || !m || !out) return fail(GWFIT_ERR_INVALID, "NULL argument");
  return guard([&] {
    if (len < static_cast<size_t>(replicates) * g->sites.n)
      throw std::invalid_argument("output buffer too small");
    SimSpec spec;
    spec.sites = &g->sites;
    spec.model = m->model.get();
    spec.theta0 = Theta(sigma2, beta);
    spec.replicates = replicates;
    spec.seed = seed;
    const Eigen::MatrixXd z = simulate(spec);
    for (int r = 0; r < replicates; ++r)
      for (int i = 0; i < g->sites.n; ++i)
        out[static_cast<size_t>(r) * g->sites.n + i] = z(r, i);
    return GWFIT_OK;
  });
}

gwfit_status gwfit_fit(const gwfit_grid* g, const gwfit_model* m, const double* data,
                       size_t data_len, double sigma2_min, double sigma2_max,
                       double beta_min, double beta_max, int starts,
                       gwfit_fit_result** out) {
  if (!g || !m || !data || !out) return fail(GWFIT_ERR_INVALID, "NULL argument");
  return guard([&] {
    if (data_len != static_cast<size_t>(g->sites.n))
      throw std::invalid_argument("data length must equal the number of sites");
    LikelihoodContext ctx;
    ctx.sites = &g->sites;
    ctx.data = Eigen::Map<const Vec>(data, g->sites.n);
    ctx.model = m->model.get();
    ctx.box = ThetaBox{sigma2_min, sigma2_max, beta_min, beta_max};
    FitConfig cfg;
    if (starts > 0) cfg.starts = starts;
    auto r = std::make_unique<gwfit_fit_result>();
    r->res = fit(ctx, cfg);
    *out = r.release();
    return GWFIT_OK;
  });
}

void gwfit_fit_result_free(gwfit_fit_result* r) { delete r; }

gwfit_status gwfit_fit_result_theta(const gwfit_fit_result* r, double* sigma2,
                                    double* beta) {
  if (!r || !sigma2 || !beta) return fail(GWFIT_ERR_INVALID, "NULL argument");
  *sigma2 = r->res.theta_hat[0];
  *beta = r->res.theta_hat[1];
  return GWFIT_OK;
}

gwfit_status gwfit_fit_result_objective(const gwfit_fit_result* r, double* out) {
  if (!r || !out) return fail(GWFIT_ERR_INVALID, "NULL argument");
  *out = r->res.objective;
  return GWFIT_OK;
}

int gwfit_fit_result_converged(const gwfit_fit_result* r) {
  return r && r->res.converged ? 1 : 0;
}

gwfit_status gwfit_fit_result_fisher(const gwfit_fit_result* r, double* out4) {
  if (!r || !out4) return fail(GWFIT_ERR_INVALID, "NULL argument");
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) out4[2 * k + l] = r->res.fisher_at_hat(k, l);
  return GWFIT_OK;
}

gwfit_status gwfit_fit_result_asymp_cov(const gwfit_fit_result* r, double* out4) {
  if (!r || !out4) return fail(GWFIT_ERR_INVALID, "NULL argument");
  for (int k = 0; k < 2; ++k)
    for (int l = 0; l < 2; ++l) out4[2 * k + l] = r->res.asymp_cov(k, l);
  return GWFIT_OK;
}

long gwfit_fit_result_json(const gwfit_fit_result* r, char* buf, size_t cap) {
  if (!r) return -1;
  const std::string s = r->res.to_json();
  if (buf && cap > 0) {
    const size_t c = std::min(cap - 1, s.size());
    std::memcpy(buf, s.data(), c);
    buf[c] = '\0';
  }
  return static_cast<long>(s.size());
}

gwfit_status gwfit_experiment_kind(const char* config_path, char* buf, size_t cap) {
  if (!config_path || !buf || cap == 0) return fail(GWFIT_ERR_INVALID, "NULL argument");
  try {
    const ExperimentConfig cfg = ExperimentConfig::load(config_path);
    const std::string name = kind_name(cfg.kind);
    const size_t c = std::min(cap - 1, name.size());
    std::memcpy(buf, name.data(), c);
    buf[c] = '\0';
    return GWFIT_OK;
  } catch (const std::exception& e) {
    return fail(GWFIT_ERR_CONFIG, e.what());
  }
}

gwfit_status gwfit_experiment_validate(const char* config_path, char* buf, size_t cap,
                                       int* n_violations) {
  if (!config_path) return fail(GWFIT_ERR_INVALID, "config_path is NULL");
  try {
    const ExperimentConfig cfg = ExperimentConfig::load(config_path);
    const ValidationReport rep = validate(cfg);
    const std::string text = rep.to_string();
    if (buf && cap > 0) {
      const size_t c = std::min(cap - 1, text.size());
      std::memcpy(buf, text.data(), c);
      buf[c] = '\0';
    }
    if (n_violations) *n_violations = static_cast<int>(rep.violations.size());
    return GWFIT_OK;
  } catch (const std::exception& e) {
    return fail(GWFIT_ERR_CONFIG, e.what());
  }
}

gwfit_status gwfit_experiment_run(const char* config_path, const char* out_dir,
                                  int threads, int has_seed, uint64_t seed,
                                  int* exit_code) {
  if (!config_path) return fail(GWFIT_ERR_INVALID, "config_path is NULL");
  try {
    ExperimentConfig cfg = ExperimentConfig::load(config_path);
    if (out_dir) cfg.out_dir = out_dir;
    if (threads > 0) cfg.threads = threads;
    if (has_seed) cfg.seed = seed;
    const int code = run_experiment(cfg);
    if (exit_code) *exit_code = code;
    return GWFIT_OK;
  } catch (const std::invalid_argument& e) {
    if (exit_code) *exit_code = 2;
    return fail(GWFIT_ERR_CONFIG, e.what());
  } catch (const std::exception& e) {
    if (exit_code) *exit_code = 3;
    return fail(GWFIT_ERR_NUMERIC, e.what());
  }
}

}  // extern "C"
