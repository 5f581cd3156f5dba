#include "core/experiment.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>

#include <json.hpp>

#include "core/io.hpp"
#include "core/stats.hpp"
#include "core/threads.hpp"

namespace gwfit {

using nlohmann::json;

std::string kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Simulate: return "simulate";
    case ExperimentKind::Fit: return "fit";
    case ExperimentKind::McConsistency: return "mc-consistency";
    case ExperimentKind::McNormality: return "mc-normality";
    case ExperimentKind::KlStudy: return "kl-study";
    case ExperimentKind::ApproxError: return "approx-error";
  }
  return "?";
}

ExperimentKind kind_from_name(const std::string& name) {
  for (auto k : {ExperimentKind::Simulate, ExperimentKind::Fit, ExperimentKind::McConsistency,
                 ExperimentKind::McNormality, ExperimentKind::KlStudy,
                 ExperimentKind::ApproxError})
    if (kind_name(k) == name) return k;
  throw std::invalid_argument("unknown experiment kind: '" + name + "'");
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["kind"] = kind_name(kind);
  j["seed"] = seed;
  j["threads"] = threads;
  j["output"] = {{"dir", out_dir}, {"prefix", prefix}};
  j["grid"] = {{"d", grid.dim}, {"tau", grid.tau}, {"n", grid.n}, {"seed", grid.seed}};
  j["model"] = {{"nu", model.nu}, {"kappa", model.kappa}, {"sigma2", model.sigma2},
                {"beta", model.beta}};
  j["theta_box"] = {{"sigma2_min", theta_box.sigma2_min}, {"sigma2_max", theta_box.sigma2_max},
                    {"beta_min", theta_box.beta_min}, {"beta_max", theta_box.beta_max}};
  j["families"] = families;
  j["approx_m"] = approx_m;
  j["n_sweep"] = n_sweep;
  j["replicates"] = replicates;
  j["fit"] = {{"starts", fit_cfg.starts}, {"max_iters", fit_cfg.max_iters},
              {"grad_tol", fit_cfg.grad_tol}, {"step_tol", fit_cfg.step_tol}};
  j["quadrature"] = {{"abs_tol", quad.abs_tol}, {"rel_tol", quad.rel_tol},
                     {"max_subdivisions", quad.max_subdivisions}};
  if (kind == ExperimentKind::Fit) {
    j["sites_csv"] = sites_csv;
    j["data_csv"] = data_csv;
    j["fit_replicate"] = fit_replicate;
  }
  if (kind == ExperimentKind::ApproxError) {
    j["m_sweep"] = m_sweep;
    j["grid_step"] = grid_step;
  }
  if (kind == ExperimentKind::KlStudy) {
    j["taper"] = {{"beta0", taper.beta0}, {"nu", taper.nu}, {"kappa", taper.kappa},
                  {"family", taper.family}, {"m_sweep", taper.m_sweep},
                  {"theta_grid", taper.theta_grid},
                  {"matern", {{"sigma2", taper.matern.sigma2}, {"range", taper.matern.range},
                              {"smoothness", taper.matern.smoothness}}}};
  }
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    // carries the byte offset of the first offending token
    throw std::invalid_argument(std::string("config does not parse: ") + e.what());
  }
  ExperimentConfig c;
  try {
  c.kind = kind_from_name(j.at("kind").get<std::string>());
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);
  if (j.contains("output")) {
    c.out_dir = j["output"].value("dir", c.out_dir);
    c.prefix = j["output"].value("prefix", c.prefix);
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    c.grid.dim = g.value("d", c.grid.dim);
    c.grid.tau = g.value("tau", c.grid.tau);
    c.grid.n = g.value("n", c.grid.n);
    c.grid.seed = g.value("seed", c.grid.seed);
  }
  if (j.contains("model")) {
    const auto& m = j["model"];
    c.model.nu = m.value("nu", c.model.nu);
    c.model.kappa = m.value("kappa", c.model.kappa);
    c.model.sigma2 = m.value("sigma2", c.model.sigma2);
    c.model.beta = m.value("beta", c.model.beta);
  }
  if (j.contains("theta_box")) {
    const auto& b = j["theta_box"];
    c.theta_box.sigma2_min = b.value("sigma2_min", c.theta_box.sigma2_min);
    c.theta_box.sigma2_max = b.value("sigma2_max", c.theta_box.sigma2_max);
    c.theta_box.beta_min = b.value("beta_min", c.theta_box.beta_min);
    c.theta_box.beta_max = b.value("beta_max", c.theta_box.beta_max);
  }
  if (j.contains("families")) c.families = j["families"].get<std::vector<std::string>>();
  c.approx_m = j.value("approx_m", c.approx_m);
  if (j.contains("n_sweep")) c.n_sweep = j["n_sweep"].get<std::vector<int>>();
  c.replicates = j.value("replicates", c.replicates);
  if (j.contains("fit")) {
    const auto& f = j["fit"];
    c.fit_cfg.starts = f.value("starts", c.fit_cfg.starts);
    c.fit_cfg.max_iters = f.value("max_iters", c.fit_cfg.max_iters);
    c.fit_cfg.grad_tol = f.value("grad_tol", c.fit_cfg.grad_tol);
    c.fit_cfg.step_tol = f.value("step_tol", c.fit_cfg.step_tol);
  }
  if (j.contains("quadrature")) {
    const auto& q = j["quadrature"];
    c.quad.abs_tol = q.value("abs_tol", c.quad.abs_tol);
    c.quad.rel_tol = q.value("rel_tol", c.quad.rel_tol);
    c.quad.max_subdivisions = q.value("max_subdivisions", c.quad.max_subdivisions);
  }
  c.sites_csv = j.value("sites_csv", c.sites_csv);
  c.data_csv = j.value("data_csv", c.data_csv);
  c.fit_replicate = j.value("fit_replicate", c.fit_replicate);
  if (j.contains("m_sweep")) c.m_sweep = j["m_sweep"].get<std::vector<int>>();
  c.grid_step = j.value("grid_step", c.grid_step);
  if (j.contains("taper")) {
    const auto& t = j["taper"];
    c.taper.beta0 = t.value("beta0", c.taper.beta0);
    c.taper.nu = t.value("nu", c.taper.nu);
    c.taper.kappa = t.value("kappa", c.taper.kappa);
    c.taper.family = t.value("family", c.taper.family);
    if (t.contains("m_sweep")) c.taper.m_sweep = t["m_sweep"].get<std::vector<int>>();
    c.taper.theta_grid = t.value("theta_grid", c.taper.theta_grid);
    if (t.contains("matern")) {
      const auto& m = t["matern"];
      c.taper.matern.sigma2 = m.value("sigma2", c.taper.matern.sigma2);
      c.taper.matern.range = m.value("range", c.taper.matern.range);
      c.taper.matern.smoothness = m.value("smoothness", c.taper.matern.smoothness);
    }
  }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config field error: ") + e.what());
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  ExperimentConfig c = from_json(ss.str());
  if (const char* s = std::getenv("GWFIT_SEED")) c.seed = std::strtoull(s, nullptr, 10);
  if (const char* s = std::getenv("GWFIT_OUT")) c.out_dir = s;
  return c;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations) os << "violation: " << v << "\n";
  for (const auto& w : warnings) os << "warning: " << w << "\n";
  if (violations.empty() && warnings.empty()) os << "ok\n";
  return os.str();
}

namespace {

bool known_family(const std::string& f) {
  return f == "exact" || f == "truncation" || f == "bernstein" || f == "linear-interp" ||
         f == "nugget";
}

ApproxFamily family_by_name(const std::string& name, double beta_max) {
  if (name == "truncation") return ApproxFamily::truncation(beta_max);
  if (name == "bernstein") return ApproxFamily::bernstein(beta_max);
  if (name == "linear-interp") return ApproxFamily::linear_interp(beta_max);
  if (name == "nugget") return ApproxFamily::nugget(beta_max);
  throw std::invalid_argument("unknown approximation family: '" + name + "'");
}

}  // namespace

ValidationReport validate(const ExperimentConfig& cfg) {
  ValidationReport rep;
  auto check = [&rep](const std::function<void()>& f) {
    try {
      f();
    } catch (const std::exception& e) {
      rep.violations.emplace_back(e.what());
    }
  };
  check([&] { cfg.grid.validate(); });
  check([&] { cfg.theta_box.validate(); });
  check([&] { cfg.fit_cfg.validate(); });
  check([&] { cfg.quad.validate(); });
  check([&] {
    SmoothnessConfig s{cfg.model.nu, cfg.model.kappa, cfg.grid.dim};
    s.validate();
  });

  const double floor = 1.0 - 2.0 * cfg.grid.tau;
  if (!(cfg.theta_box.beta_min > floor)) {
    std::ostringstream os;
    os << "theta_box.beta_min = " << cfg.theta_box.beta_min
       << " must exceed the minimal site spacing 1 - 2*tau = " << floor;
    rep.violations.push_back(os.str());
  }
  for (const auto& f : cfg.families)
    if (!known_family(f)) rep.violations.push_back("unknown family '" + f + "'");
  if (!cfg.theta_box.contains(cfg.model.sigma2, cfg.model.beta))
    rep.warnings.push_back("theta0 lies outside theta_box; estimates will be clipped");

  if (cfg.kind == ExperimentKind::McConsistency && !(cfg.model.kappa > 2.0))
    rep.warnings.push_back("consistency study: kappa > 2 is required by the theory");
  if (cfg.kind == ExperimentKind::McNormality && !(cfg.model.kappa > 4.0))
    rep.warnings.push_back("normality study: kappa > 4 is required by the theory");
  if (cfg.replicates < 1) rep.violations.push_back("replicates must be >= 1");
  if (cfg.kind == ExperimentKind::Fit) {
    if (cfg.sites_csv.empty()) rep.violations.push_back("fit: sites_csv is required");
    if (cfg.data_csv.empty()) rep.violations.push_back("fit: data_csv is required");
  }
  if (cfg.kind == ExperimentKind::KlStudy) {
    check([&] {
      TaperSpec t;
      t.beta0 = cfg.taper.beta0;
      t.smooth = {cfg.taper.nu, cfg.taper.kappa, cfg.grid.dim};
      t.validate();
      cfg.taper.matern.validate();
    });
    if (!known_family(cfg.taper.family) || cfg.taper.family == "exact")
      rep.violations.push_back("kl-study: taper.family must name an approximation scheme");
  }
  return rep;
}

std::unique_ptr<RadialModel> make_family_model(const ExperimentConfig& cfg,
                                               const std::string& family, int n) {
  const SmoothnessConfig smooth{cfg.model.nu, cfg.model.kappa, cfg.grid.dim};
  if (family == "exact") return std::make_unique<WendlandModel>(smooth, cfg.quad);
  const int m = cfg.approx_m > 0 ? cfg.approx_m : n;
  return std::make_unique<ApproxModel>(family_by_name(family, cfg.theta_box.beta_max), m,
                                       smooth, cfg.quad);
}

std::vector<McFitOutcome> run_mc_fits(const ExperimentConfig& cfg) {
  std::vector<int> sizes = cfg.n_sweep.empty() ? std::vector<int>{cfg.grid.n} : cfg.n_sweep;
  const Theta theta0(cfg.model.sigma2, cfg.model.beta);
  const SmoothnessConfig smooth{cfg.model.nu, cfg.model.kappa, cfg.grid.dim};
  const WendlandModel data_model(smooth, cfg.quad);
  const double chi2_95 = chi2_quantile_2dof(0.95);

  std::vector<McFitOutcome> out;
  for (int n : sizes) {
    GridSpec gs = cfg.grid;
    gs.n = n;
    gs.seed = cfg.grid.seed + static_cast<uint64_t>(n);
    const SiteSet sites = generate(gs);

    SimSpec sim;
    sim.sites = &sites;
    sim.model = &data_model;
    sim.theta0 = theta0;
    sim.replicates = cfg.replicates;
    sim.seed = cfg.seed ^ (0x9E3779B97F4A7C15ull * static_cast<uint64_t>(n));
    sim.threads = cfg.threads;
    const Eigen::MatrixXd obs = simulate(sim);

    for (const auto& family : cfg.families) {
      const auto model = make_family_model(cfg, family, n);
      std::vector<McFitOutcome> slot(cfg.replicates);
      parallel_for(cfg.replicates, cfg.threads, [&](int r) {
        McFitOutcome& o = slot[r];
        o.family = family;
        o.n = n;
        o.replicate = r;
        try {
          LikelihoodContext ctx;
          ctx.sites = &sites;
          ctx.data = obs.row(r).transpose();
          ctx.model = model.get();
          ctx.box = cfg.theta_box;
          const FitResult res = fit(ctx, cfg.fit_cfg);
          o.theta_hat = res.theta_hat;
          o.objective = res.objective;
          o.converged = res.converged;
          const Theta d = res.theta_hat - theta0;
          o.ellipse_stat = n * d.dot(res.fisher_at_hat * d);
          o.covered95 = o.ellipse_stat <= chi2_95;
          const Eigen::SelfAdjointEigenSolver<Mat2> es(res.fisher_at_hat);
          if (es.eigenvalues().minCoeff() > 0.0) {
            const Mat2 sqrt_fisher = es.operatorSqrt();
            o.standardized = std::sqrt(static_cast<double>(n)) * (sqrt_fisher * d);
          }
          o.ok = true;
        } catch (const std::exception& e) {
          o.ok = false;
          o.error = e.what();
        }
      });
      out.insert(out.end(), slot.begin(), slot.end());
    }
  }
  return out;
}

KlStudyResult run_kl_study(const ExperimentConfig& cfg) {
  const SiteSet sites = generate(cfg.grid);
  KlStudyResult res;
  res.m_sweep = cfg.taper.m_sweep;

  TaperSpec exact_taper;
  exact_taper.beta0 = cfg.taper.beta0;
  exact_taper.smooth = {cfg.taper.nu, cfg.taper.kappa, cfg.grid.dim};
  exact_taper.validate();

  const auto approx_family = std::make_shared<const ApproxFamily>(
      family_by_name(cfg.taper.family, cfg.taper.beta0));

  // sup over a coarse theta grid of |d - d_approx|, per fidelity m
  constexpr int kGapGrid = 5;
  std::vector<MaternParams> gap_thetas;
  for (int a = 0; a < kGapGrid; ++a)
    for (int b = 0; b < kGapGrid; ++b) {
      MaternParams p = cfg.taper.matern;
      p.sigma2 = cfg.theta_box.sigma2_min +
                 (cfg.theta_box.sigma2_max - cfg.theta_box.sigma2_min) * a / (kGapGrid - 1);
      p.range = cfg.theta_box.beta_min +
                (cfg.theta_box.beta_max - cfg.theta_box.beta_min) * b / (kGapGrid - 1);
      gap_thetas.push_back(p);
    }
  std::vector<double> d_exact(gap_thetas.size());
  for (size_t i = 0; i < gap_thetas.size(); ++i)
    d_exact[i] = kl_divergence(sites, cfg.taper.matern, gap_thetas[i], exact_taper, cfg.quad);

  for (int m : cfg.taper.m_sweep) {
    TaperSpec approx_taper = exact_taper;
    approx_taper.approx = approx_family;
    approx_taper.m = m;
    double sup = 0.0;
    for (size_t i = 0; i < gap_thetas.size(); ++i) {
      const double dm =
          kl_divergence(sites, cfg.taper.matern, gap_thetas[i], approx_taper, cfg.quad);
      sup = std::max(sup, std::abs(dm - d_exact[i]));
    }
    res.sup_gap.push_back(sup);
  }

  // data from the exact Matern law; truncated-tapered fit with m = r(n) = n
  const MaternModel matern_model(cfg.taper.matern.smoothness);
  SimSpec sim;
  sim.sites = &sites;
  sim.model = &matern_model;
  sim.theta0 = Theta(cfg.taper.matern.sigma2, cfg.taper.matern.range);
  sim.replicates = 1;
  sim.seed = cfg.seed;
  sim.threads = 1;
  const Eigen::MatrixXd obs = simulate(sim);

  TaperSpec fit_taper = exact_taper;
  fit_taper.approx = approx_family;
  fit_taper.m = cfg.approx_m > 0 ? cfg.approx_m : sites.n;
  const FitResult fr = fit_tapered(sites, obs.row(0).transpose(), cfg.taper.matern.smoothness,
                                   fit_taper, cfg.theta_box, cfg.fit_cfg, cfg.quad);
  res.theta_fit = fr.theta_hat;

  MaternParams at_fit = cfg.taper.matern;
  at_fit.sigma2 = fr.theta_hat[0];
  at_fit.range = fr.theta_hat[1];
  res.d_at_fit = kl_divergence(sites, cfg.taper.matern, at_fit, exact_taper, cfg.quad);

  // fine scan of d over the box with the exact taper
  const int g = cfg.taper.theta_grid;
  double dmin = std::numeric_limits<double>::infinity(), dmax = -dmin;
  std::vector<double> dvals(static_cast<size_t>(g) * g);
  parallel_for(g * g, cfg.threads, [&](int idx) {
    const int a = idx / g, b = idx % g;
    MaternParams p = cfg.taper.matern;
    p.sigma2 = cfg.theta_box.sigma2_min +
               (cfg.theta_box.sigma2_max - cfg.theta_box.sigma2_min) * a / (g - 1);
    p.range = cfg.theta_box.beta_min +
              (cfg.theta_box.beta_max - cfg.theta_box.beta_min) * b / (g - 1);
    dvals[idx] = kl_divergence(sites, cfg.taper.matern, p, exact_taper, cfg.quad);
  });
  for (double v : dvals) {
    dmin = std::min(dmin, v);
    dmax = std::max(dmax, v);
  }
  res.d_grid_min = dmin;
  res.d_grid_max = dmax;
  return res;
}

namespace {

namespace fs = std::filesystem;

std::string path_join(const ExperimentConfig& cfg, const std::string& suffix) {
  return (fs::path(cfg.out_dir) / (cfg.prefix + suffix)).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << text;
}

int run_mc_kind(const ExperimentConfig& cfg) {
  const auto outcomes = run_mc_fits(cfg);
  const Theta theta0(cfg.model.sigma2, cfg.model.beta);

  std::ostringstream est, lng;
  est.precision(17);
  lng.precision(17);
  est << "family,n,replicate,ok,converged,sigma2_hat,beta_hat,objective,covered95,"
         "z_sigma2,z_beta,error\n";
  lng << "study,family,metric,x,replicate,value\n";
  const std::string study = kind_name(cfg.kind);
  int failures = 0;
  std::ostringstream errlog;
  for (const auto& o : outcomes) {
    est << o.family << "," << o.n << "," << o.replicate << "," << o.ok << "," << o.converged
        << "," << o.theta_hat[0] << "," << o.theta_hat[1] << "," << o.objective << ","
        << o.covered95 << "," << o.standardized[0] << "," << o.standardized[1] << ",\""
        << o.error << "\"\n";
    if (!o.ok) {
      ++failures;
      errlog << o.family << " n=" << o.n << " replicate=" << o.replicate << ": " << o.error
             << "\n";
      continue;
    }
    const double err = (o.theta_hat - theta0).norm();
    lng << study << "," << o.family << ",abs_error," << o.n << "," << o.replicate << "," << err
        << "\n";
    lng << study << "," << o.family << ",z_sigma2," << o.n << "," << o.replicate << ","
        << o.standardized[0] << "\n";
    lng << study << "," << o.family << ",z_beta," << o.n << "," << o.replicate << ","
        << o.standardized[1] << "\n";
  }
  write_text(path_join(cfg, "_estimates.csv"), est.str());
  write_text(path_join(cfg, "_long.csv"), lng.str());

  json summary;
  summary["kind"] = study;
  summary["replicates"] = cfg.replicates;
  summary["theta0"] = {theta0[0], theta0[1]};
  for (const auto& family : cfg.families) {
    json fam;
    std::vector<int> sizes = cfg.n_sweep.empty() ? std::vector<int>{cfg.grid.n} : cfg.n_sweep;
    std::vector<double> medians;
    for (int n : sizes) {
      std::vector<double> errs, zs[2];
      std::vector<double> biases[2], sqs[2];
      int covered = 0, okcount = 0;
      for (const auto& o : outcomes) {
        if (o.family != family || o.n != n || !o.ok) continue;
        ++okcount;
        errs.push_back((o.theta_hat - theta0).norm());
        for (int k = 0; k < 2; ++k) {
          biases[k].push_back(o.theta_hat[k] - theta0[k]);
          sqs[k].push_back(std::pow(o.theta_hat[k] - theta0[k], 2));
          zs[k].push_back(o.standardized[k]);
        }
        covered += o.covered95 ? 1 : 0;
      }
      json per_n;
      per_n["n"] = n;
      per_n["fits_ok"] = okcount;
      if (okcount > 0) {
        per_n["median_error"] = median(errs);
        per_n["bias"] = {mean(biases[0]), mean(biases[1])};
        per_n["mse"] = {mean(sqs[0]), mean(sqs[1])};
        per_n["coverage95"] = static_cast<double>(covered) / okcount;
        if (cfg.kind == ExperimentKind::McNormality) {
          per_n["ks_stat"] = {ks_statistic(zs[0]), ks_statistic(zs[1])};
          per_n["ks_pvalue"] = {ks_pvalue(ks_statistic(zs[0]), okcount),
                                ks_pvalue(ks_statistic(zs[1]), okcount)};
        }
        medians.push_back(median(errs));
      }
      fam["per_n"].push_back(per_n);
    }
    bool decreasing = medians.size() >= 2;
    for (size_t i = 1; i < medians.size(); ++i) decreasing &= medians[i] < medians[i - 1];
    fam["median_error_decreasing"] = decreasing;
    summary["families"][family] = fam;
  }
  summary["failures"] = failures;
  write_text(path_join(cfg, "_summary.json"), summary.dump(2));
  if (failures > 0) {
    write_text(path_join(cfg, "_errors.log"), errlog.str());
    return 3;
  }
  return 0;
}

int run_simulate_kind(const ExperimentConfig& cfg) {
  const SiteSet sites = generate(cfg.grid);
  const SmoothnessConfig smooth{cfg.model.nu, cfg.model.kappa, cfg.grid.dim};
  const WendlandModel model(smooth, cfg.quad);
  SimSpec sim;
  sim.sites = &sites;
  sim.model = &model;
  sim.theta0 = Theta(cfg.model.sigma2, cfg.model.beta);
  sim.replicates = cfg.replicates;
  sim.seed = cfg.seed;
  sim.threads = cfg.threads;
  const Eigen::MatrixXd obs = simulate(sim);

  write_sites_csv(sites, path_join(cfg, "_sites.csv"));
  write_sites_binary(sites, path_join(cfg, "_sites.bin"));
  write_observations_csv(obs, path_join(cfg, "_obs.csv"));
  write_observations_binary(sites, obs, path_join(cfg, "_obs.bin"));

  json summary;
  summary["kind"] = "simulate";
  summary["n"] = sites.n;
  summary["replicates"] = cfg.replicates;
  summary["min_spacing"] = sites.n > 1 ? min_spacing(sites) : 0.0;
  summary["mean_square"] = obs.array().square().mean();
  write_text(path_join(cfg, "_summary.json"), summary.dump(2));
  return 0;
}

int run_fit_kind(const ExperimentConfig& cfg) {
  const SiteSet sites = read_sites_csv(cfg.sites_csv, cfg.grid.tau, cfg.grid.seed);
  const Eigen::MatrixXd obs = read_observations_csv(cfg.data_csv);
  if (cfg.fit_replicate < 0 || cfg.fit_replicate >= obs.rows())
    throw std::invalid_argument("fit: fit_replicate out of range of the data csv");
  const auto model = make_family_model(cfg, cfg.families.at(0), sites.n);
  LikelihoodContext ctx;
  ctx.sites = &sites;
  ctx.data = obs.row(cfg.fit_replicate).transpose();
  ctx.model = model.get();
  ctx.box = cfg.theta_box;
  const FitResult res = fit(ctx, cfg.fit_cfg);
  write_text(path_join(cfg, "_fit.json"), res.to_json());

  json summary;
  summary["kind"] = "fit";
  summary["theta_hat"] = {res.theta_hat[0], res.theta_hat[1]};
  summary["objective"] = res.objective;
  summary["converged"] = res.converged;
  write_text(path_join(cfg, "_summary.json"), summary.dump(2));
  return 0;
}

int run_kl_kind(const ExperimentConfig& cfg) {
  const KlStudyResult r = run_kl_study(cfg);
  std::ostringstream lng;
  lng.precision(17);
  lng << "study,family,metric,x,replicate,value\n";
  for (size_t i = 0; i < r.m_sweep.size(); ++i)
    lng << "kl-study," << cfg.taper.family << ",sup_kl_gap," << r.m_sweep[i] << ",0,"
        << r.sup_gap[i] << "\n";
  write_text(path_join(cfg, "_long.csv"), lng.str());

  json summary;
  summary["kind"] = "kl-study";
  summary["m_sweep"] = r.m_sweep;
  summary["sup_gap"] = r.sup_gap;
  bool decreasing = r.sup_gap.size() >= 2;
  for (size_t i = 1; i < r.sup_gap.size(); ++i) decreasing &= r.sup_gap[i] < r.sup_gap[i - 1];
  summary["sup_gap_decreasing"] = decreasing;
  summary["theta_fit"] = {r.theta_fit[0], r.theta_fit[1]};
  summary["d_at_fit"] = r.d_at_fit;
  summary["d_grid_min"] = r.d_grid_min;
  summary["d_grid_max"] = r.d_grid_max;
  summary["near_infimum"] =
      r.d_at_fit <= r.d_grid_min + 0.10 * (r.d_grid_max - r.d_grid_min);
  write_text(path_join(cfg, "_summary.json"), summary.dump(2));
  return 0;
}

int run_approx_error_kind(const ExperimentConfig& cfg) {
  const SmoothnessConfig smooth{cfg.model.nu, cfg.model.kappa, cfg.grid.dim};
  const double step =
      cfg.grid_step > 0.0 ? cfg.grid_step : (1.0 - 2.0 * cfg.grid.tau) / 50.0;
  std::ostringstream lng;
  lng.precision(17);
  lng << "study,family,metric,x,replicate,value\n";
  json summary;
  summary["kind"] = "approx-error";
  for (const auto& name : cfg.families) {
    if (name == "exact") continue;
    const ApproxFamily fam = family_by_name(name, cfg.theta_box.beta_max);
    json curve;
    for (int m : cfg.m_sweep) {
      const double err = sup_error(fam, m, smooth, cfg.theta_box, step, cfg.quad);
      lng << "approx-error," << name << ",sup_error," << m << ",0," << err << "\n";
      curve["m"].push_back(m);
      curve["sup_error"].push_back(err);
    }
    summary["families"][name] = curve;
  }
  write_text(path_join(cfg, "_long.csv"), lng.str());
  write_text(path_join(cfg, "_summary.json"), summary.dump(2));
  return 0;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg) {
  const ValidationReport rep = validate(cfg);
  if (!rep.ok()) {
    std::ostringstream os;
    os << "invalid configuration:\n" << rep.to_string();
    throw std::invalid_argument(os.str());
  }
  fs::create_directories(cfg.out_dir);
  switch (cfg.kind) {
    case ExperimentKind::Simulate: return run_simulate_kind(cfg);
    case ExperimentKind::Fit: return run_fit_kind(cfg);
    case ExperimentKind::McConsistency:
    case ExperimentKind::McNormality: return run_mc_kind(cfg);
    case ExperimentKind::KlStudy: return run_kl_kind(cfg);
    case ExperimentKind::ApproxError: return run_approx_error_kind(cfg);
  }
  return 2;
}

int run_experiment_file(const std::string& config_path) {
  ExperimentConfig cfg;
  try {
    cfg = ExperimentConfig::load(config_path);
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string("config error: ") + e.what());
  }
  return run_experiment(cfg);
}

}  // namespace gwfit
