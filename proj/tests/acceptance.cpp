// Acceptance suite: one statistical/property criterion per section, each
// printing a single PASS/FAIL line. Run all with no arguments, or pass
// criterion numbers (1..9) to run a subset. Exit code is the number of
// failed criteria.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "core/experiment.hpp"
#include "core/io.hpp"
#include "core/rng.hpp"
#include "core/stats.hpp"
#include "core/threads.hpp"
#include "oracles.hpp"

using namespace gwfit;

namespace {

constexpr int kThreads = 2;

// shared study setting: d = 2, tau = 0.3, nu = 9, kappa = 4.5
const SmoothnessConfig kSmooth{9.0, 4.5, 2};
const double kTau = 0.3;
const Theta kTheta0(1.0, 1.8);
const ThetaBox kScanBox{0.5, 2.0, 1.2, 2.5};   // grid scans (criteria 3, 4, 7)
const ThetaBox kFitBox{0.2, 3.0, 0.5, 4.0};    // MC fitting (criteria 5, 6)

struct Check {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& msg) {
    if (!cond) {
      ok = false;
      detail += (detail.empty() ? "" : "; ") + msg;
    }
  }
  void note(const std::string& msg) { detail += (detail.empty() ? "" : "; ") + msg; }
};

std::vector<Theta> theta_grid(const ThetaBox& box, int g) {
  std::vector<Theta> out;
  for (int a = 0; a < g; ++a)
    for (int b = 0; b < g; ++b)
      out.emplace_back(box.sigma2_min + (box.sigma2_max - box.sigma2_min) * a / (g - 1),
                       box.beta_min + (box.beta_max - box.beta_min) * b / (g - 1));
  return out;
}

ApproxFamily family_of(const std::string& name, double beta_max) {
  if (name == "truncation") return ApproxFamily::truncation(beta_max);
  if (name == "bernstein") return ApproxFamily::bernstein(beta_max);
  if (name == "linear-interp") return ApproxFamily::linear_interp(beta_max);
  return ApproxFamily::nugget(beta_max);
}

const std::vector<std::string> kApproxNames = {"truncation", "bernstein", "linear-interp",
                                               "nugget"};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3g", x);
  return buf;
}

// ---- criterion 1: quadrature vs closed forms --------------------------

Check criterion1() {
  Check c;
  const QuadratureConfig quad;
  double worst = 0.0;
  for (int kappa : {1, 2, 3}) {
    const double nu = 4.5 + kappa;
    for (int i = 0; i <= 100; ++i) {
      const double r = i / 100.0;
      const double diff = std::abs(detail::phi_base_quadrature(nu, kappa, r, quad) -
                                   detail::phi_base_closed_form(nu, kappa, r));
      worst = std::max(worst, diff);
    }
  }
  c.require(worst <= 1e-10, "max |quadrature - closed form| = " + fmt(worst));
  c.note("max abs deviation " + fmt(worst));
  return c;
}

// ---- criterion 2: analytic derivatives vs finite differences ----------

Check criterion2() {
  Check c;
  const double nu = 9.5, kappa = 5.5;
  const CounterRng rng(20260801);
  std::vector<std::pair<double, double>> first, higher;  // (analytic, oracle)
  for (int i = 0; i < 50; ++i) {
    const double s2 = 0.5 + 2.0 * rng.uniform01(3 * i);
    const double b = 1.0 + 2.0 * rng.uniform01(3 * i + 1);
    const double t = (0.1 + 0.8 * rng.uniform01(3 * i + 2)) * b;
    const WendlandParams p{s2, b, {nu, kappa, 2}};
    const auto in_beta = [&](double bb) {
      return eval_phi(WendlandParams{s2, bb, {nu, kappa, 2}}, t);
    };
    const auto in_s2_slope = [&](double bb) {
      // exact sigma2 difference quotient (the kernel is linear in sigma2)
      return eval_phi(WendlandParams{2.0, bb, {nu, kappa, 2}}, t) -
             eval_phi(WendlandParams{1.0, bb, {nu, kappa, 2}}, t);
    };
    first.emplace_back(eval_dphi(p, t, {0, 1}), oracle::diff1(in_beta, b, 1e-3));
    first.emplace_back(eval_dphi(p, t, {1, 0}),
                       eval_phi(WendlandParams{1.0, b, {nu, kappa, 2}}, t));
    first.emplace_back(eval_dphi(p, t, {1, 1}), oracle::diff1(in_s2_slope, b, 1e-3));
    higher.emplace_back(eval_dphi(p, t, {0, 2}), oracle::diff2(in_beta, b, 2e-3));
    higher.emplace_back(eval_dphi(p, t, {1, 2}), oracle::diff2(in_s2_slope, b, 2e-3));
    higher.emplace_back(eval_dphi(p, t, {0, 3}), oracle::diff3(in_beta, b, 5e-3));
  }
  // Relative error judged against the derivative value where it has
  // magnitude, and against 1% of the order's scale near zero crossings
  // (where the stencil's own roundoff floor dominates any pointwise ratio).
  const auto worst_of = [](const std::vector<std::pair<double, double>>& pairs) {
    double scale = 0.0;
    for (const auto& [an, fd] : pairs) scale = std::max(scale, std::abs(fd));
    double worst = 0.0;
    for (const auto& [an, fd] : pairs)
      worst = std::max(worst,
                       std::abs(an - fd) / std::max(std::abs(fd), 1e-2 * scale));
    return worst;
  };
  const double worst1 = worst_of(first), worst23 = worst_of(higher);
  c.require(worst1 <= 1e-5, "first-order rel error " + fmt(worst1));
  c.require(worst23 <= 1e-4, "higher-order rel error " + fmt(worst23));
  c.note("first " + fmt(worst1) + ", higher " + fmt(worst23));
  return c;
}

// ---- criterion 3: eventual positive-definiteness ----------------------

Check criterion3() {
  Check c;
  const std::vector<int> sweep = {50, 100, 200, 400};
  const auto grid_pts = theta_grid(kScanBox, 5);
  for (const auto& name : kApproxNames) {
    std::vector<bool> all_pd;
    for (int n : sweep) {
      const SiteSet sites = generate({2, kTau, n, 1700 + static_cast<uint64_t>(n)});
      const ApproxModel model(family_of(name, kScanBox.beta_max), n, kSmooth);
      bool pd = true;
      for (const Theta& theta : grid_pts) {
        const auto bk = model.bind(theta, 0);
        if (!factorize(assemble(sites, bk.value, bk.support)).is_pd()) {
          pd = false;
          break;
        }
      }
      all_pd.push_back(pd);
    }
    // smallest tested size after which everything stays positive-definite
    int n_star = -1;
    for (size_t i = 0; i < sweep.size(); ++i) {
      bool tail_ok = true;
      for (size_t j = i; j < sweep.size(); ++j) tail_ok &= all_pd[j];
      if (tail_ok) {
        n_star = sweep[i];
        break;
      }
    }
    c.require(n_star > 0 && n_star <= 400, name + ": no PD onset within the sweep");
    if (n_star > 0) c.note(name + " PD from n = " + std::to_string(n_star));
  }
  return c;
}

// ---- criterion 4: likelihood equivalence ------------------------------

Check criterion4() {
  Check c;
  const std::vector<int> sweep = {100, 400, 900};
  const auto grid_pts = theta_grid(kScanBox, 5);
  const WendlandModel exact(kSmooth);

  // one nested realization: the n-site set is the first n sites of a single
  // perturbed-grid draw, and z_n is the prefix of one field draw on it
  const SiteSet all_sites = generate({2, kTau, sweep.back(), 431});
  SimSpec sim;
  sim.sites = &all_sites;
  sim.model = &exact;
  sim.theta0 = kTheta0;
  sim.replicates = 1;
  sim.seed = 997;
  const Vec all_z = simulate(sim).row(0).transpose();

  std::map<std::string, std::vector<double>> gaps;
  for (int n : sweep) {
    SiteSet sites = all_sites;
    sites.n = n;
    sites.coords.resize(static_cast<size_t>(n) * sites.dim);
    const Vec z = all_z.head(n);

    LikelihoodContext ce;
    ce.sites = &sites;
    ce.data = z;
    ce.model = &exact;
    ce.box = kScanBox;
    std::vector<double> exact_vals(grid_pts.size());
    for (size_t i = 0; i < grid_pts.size(); ++i)
      exact_vals[i] = eval_loglik(ce, grid_pts[i]).value;

    for (const auto& name : kApproxNames) {
      const ApproxModel approx(family_of(name, kScanBox.beta_max), n, kSmooth);
      LikelihoodContext ca = ce;
      ca.model = &approx;
      double sup = 0.0;
      for (size_t i = 0; i < grid_pts.size(); ++i)
        sup = std::max(sup, std::abs(eval_loglik(ca, grid_pts[i]).value - exact_vals[i]));
      gaps[name].push_back(sup);
    }
  }
  // the truncation cut exceeds beta_max from m = 100 on, so its gap is
  // identically zero; the likelihoods coincide rather than merely converge
  for (double g : gaps["truncation"])
    c.require(g == 0.0, "truncation gap " + fmt(g) + " != 0");
  for (const auto& name : {"bernstein", "linear-interp", "nugget"}) {
    const auto& g = gaps[name];
    c.require(g[1] < g[0] && g[2] < g[1],
              std::string(name) + " gaps not strictly decreasing: " + fmt(g[0]) + " -> " +
                  fmt(g[1]) + " -> " + fmt(g[2]));
    c.note(std::string(name) + " " + fmt(g[0]) + "/" + fmt(g[1]) + "/" + fmt(g[2]));
  }
  return c;
}

// ---- criteria 5 and 6: Monte Carlo asymptotics ------------------------

ExperimentConfig mc_config() {
  ExperimentConfig cfg;
  cfg.seed = 52025;
  cfg.threads = kThreads;
  cfg.grid = {2, kTau, 400, 41};
  cfg.model = {kSmooth.nu, kSmooth.kappa, kTheta0[0], kTheta0[1]};
  cfg.theta_box = kFitBox;
  cfg.fit_cfg.starts = 3;
  return cfg;
}

Check criterion5() {
  Check c;
  ExperimentConfig cfg = mc_config();
  cfg.kind = ExperimentKind::McConsistency;
  cfg.families = {"exact", "truncation", "bernstein", "linear-interp", "nugget"};
  cfg.n_sweep = {100, 225, 400};
  cfg.replicates = 100;
  const auto outcomes = run_mc_fits(cfg);

  for (const auto& family : cfg.families) {
    std::vector<double> med;
    for (int n : cfg.n_sweep) {
      std::vector<double> errs;
      int failed = 0;
      for (const auto& o : outcomes) {
        if (o.family != family || o.n != n) continue;
        if (!o.ok) {
          ++failed;
          continue;
        }
        errs.push_back((o.theta_hat - kTheta0).norm());
      }
      c.require(failed == 0, family + ": " + std::to_string(failed) + " failed fits");
      med.push_back(median(errs));
    }
    c.require(med[1] < med[0] && med[2] < med[1],
              family + " medians not strictly decreasing: " + fmt(med[0]) + " -> " +
                  fmt(med[1]) + " -> " + fmt(med[2]));
    c.note(family + " " + fmt(med[0]) + "/" + fmt(med[1]) + "/" + fmt(med[2]));
  }
  return c;
}

Check criterion6() {
  Check c;
  ExperimentConfig cfg = mc_config();
  cfg.kind = ExperimentKind::McNormality;
  cfg.families = {"exact"};
  cfg.n_sweep = {400};
  cfg.replicates = 200;
  // Normality needs a design where n = 400 is already asymptotic: at
  // (nu, beta0) = (9, 1.8) the range information is so weak that ~8% of
  // likelihoods are minimized at the box edge (sd(beta_hat) ~ 0.37, the edge
  // only 3.5 sd away). nu = 6.5 with beta0 = 2.5 puts the edge 12 sd out.
  cfg.model = {6.5, kSmooth.kappa, 1.0, 2.5};
  cfg.theta_box = {0.2, 3.0, 0.5, 4.5};
  const auto outcomes = run_mc_fits(cfg);

  std::vector<double> z0, z1;
  int covered = 0, covered99 = 0, total = 0;
  for (const auto& o : outcomes) {
    c.require(o.ok, "replicate " + std::to_string(o.replicate) + " failed: " + o.error);
    if (!o.ok) continue;
    z0.push_back(o.standardized[0]);
    z1.push_back(o.standardized[1]);
    covered += o.covered95 ? 1 : 0;
    covered99 += o.ellipse_stat <= chi2_quantile_2dof(0.99) ? 1 : 0;
    ++total;
  }
  const double p0 = ks_pvalue(ks_statistic(z0), static_cast<int>(z0.size()));
  const double p1 = ks_pvalue(ks_statistic(z1), static_cast<int>(z1.size()));
  c.require(p0 > 0.01, "KS rejected for the variance coordinate (p = " + fmt(p0) + ")");
  c.require(p1 > 0.01, "KS rejected for the range coordinate (p = " + fmt(p1) + ")");
  const double coverage = static_cast<double>(covered) / total;
  const double coverage99 = static_cast<double>(covered99) / total;
  c.require(coverage >= 0.90 && coverage <= 0.99, "coverage " + fmt(coverage));
  c.require(coverage99 >= 0.95, "99% ellipse coverage " + fmt(coverage99) + " below 0.95");
  c.note("KS p = " + fmt(p0) + "/" + fmt(p1) + ", coverage " + fmt(coverage) + " (99%: " +
         fmt(coverage99) + ")");
  return c;
}

// ---- criterion 7: eigenvalue bounds ------------------------------------

Check criterion7() {
  Check c;
  const auto grid_pts = theta_grid(kScanBox, 5);
  const double ceiling =
      kScanBox.sigma2_max * packing_bound(2, kScanBox.beta_max, kTau);
  double floor = std::numeric_limits<double>::infinity();
  double highest = 0.0;
  const WendlandModel model(kSmooth);
  for (int n : {50, 100, 200, 350, 500}) {
    const SiteSet sites = generate({2, kTau, n, 7000 + static_cast<uint64_t>(n)});
    for (const Theta& theta : grid_pts) {
      const auto bk = model.bind(theta, 0);
      const SymMatrix sigma = assemble(sites, bk.value, bk.support);
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma.dense());
      floor = std::min(floor, es.eigenvalues().minCoeff());
      highest = std::max(highest, es.eigenvalues().maxCoeff());
      c.require(es.eigenvalues().maxCoeff() <= ceiling,
                "lambda_max " + fmt(es.eigenvalues().maxCoeff()) + " above the packing bound " +
                    fmt(ceiling));
    }
  }
  c.require(floor > 0.0, "eigenvalue floor " + fmt(floor) + " not positive");
  c.note("floor " + fmt(floor) + ", max " + fmt(highest) + ", ceiling " + fmt(ceiling));
  return c;
}

// ---- criterion 8: tapering and Kullback-Leibler ------------------------

Check criterion8() {
  Check c;
  ExperimentConfig cfg;
  cfg.seed = 82025;
  cfg.threads = kThreads;
  cfg.model = {kSmooth.nu, kSmooth.kappa, 1.0, 1.8};
  cfg.kind = ExperimentKind::KlStudy;
  cfg.theta_box = {0.5, 2.0, 0.5, 2.0};
  cfg.taper.beta0 = 1.5;
  cfg.taper.nu = 6.0;
  cfg.taper.kappa = 3.0;
  cfg.taper.family = "linear-interp";
  cfg.taper.matern = {1.0, 1.0, 1.5};
  cfg.taper.theta_grid = 25;

  // part 1: sup-theta KL gap decreasing along the fidelity sweep at n = 200
  cfg.grid = {2, kTau, 200, 81};
  cfg.taper.m_sweep = {10, 100, 1000};
  const KlStudyResult sweep = run_kl_study(cfg);
  c.require(sweep.sup_gap[1] < sweep.sup_gap[0] && sweep.sup_gap[2] < sweep.sup_gap[1],
            "KL gaps not decreasing: " + fmt(sweep.sup_gap[0]) + " -> " +
                fmt(sweep.sup_gap[1]) + " -> " + fmt(sweep.sup_gap[2]));
  c.note("gaps " + fmt(sweep.sup_gap[0]) + "/" + fmt(sweep.sup_gap[1]) + "/" +
         fmt(sweep.sup_gap[2]));

  // part 2: the truncated-tapered estimate nearly minimizes d over the box
  cfg.grid = {2, kTau, 400, 82};
  cfg.taper.m_sweep = {100};  // keep the sweep cheap; only the fit matters here
  const KlStudyResult fit_res = run_kl_study(cfg);
  const double slack = 0.10 * (fit_res.d_grid_max - fit_res.d_grid_min);
  c.require(fit_res.d_at_fit <= fit_res.d_grid_min + slack,
            "d at the estimate " + fmt(fit_res.d_at_fit) + " above grid minimum " +
                fmt(fit_res.d_grid_min) + " + 10% range " + fmt(slack));
  c.note("d_fit " + fmt(fit_res.d_at_fit) + ", grid min " + fmt(fit_res.d_grid_min) +
         ", grid max " + fmt(fit_res.d_grid_max));
  return c;
}

// ---- criterion 9: oracle equivalences ----------------------------------

Check criterion9() {
  Check c;
  // sparse assembly == dense brute force
  for (uint64_t seed = 1; seed <= 10; ++seed) {
    const int n = 50 + static_cast<int>(seed) * 25;  // up to 300
    const SiteSet sites = generate({2, kTau, n, seed});
    const WendlandModel model(kSmooth);
    const Theta theta(0.7 + 0.1 * seed, 1.3 + 0.1 * seed);
    const auto bk = model.bind(theta, 0);
    const SymMatrix sparse = assemble(sites, bk.value, bk.support);
    const double diff =
        (sparse.dense() - oracle::brute_assemble(sites, bk.value)).cwiseAbs().maxCoeff();
    c.require(diff == 0.0, "assembly mismatch " + fmt(diff) + " at n = " + std::to_string(n));
  }

  // pseudo-inverse round trip on positive-definite input
  {
    const SiteSet sites = generate({2, kTau, 120, 3});
    const WendlandModel model(kSmooth);
    const auto bk = model.bind(kTheta0, 0);
    const SymMatrix sigma = assemble(sites, bk.value, bk.support);
    const Factorization f = factorize(sigma);
    const CounterRng rng(17);
    Vec v(120);
    for (int i = 0; i < 120; ++i) v[i] = rng.normal(i);
    const double rt = (Vec(sigma.mat * f.apply_pinv(v)) - v).norm() / v.norm();
    c.require(rt <= 1e-10, "pinv round trip " + fmt(rt));
    c.note("pinv round trip " + fmt(rt));
  }

  // det_+ on constructed indefinite matrices vs a dense eigendecomposition
  {
    const CounterRng rng(29);
    double worst = 0.0;
    for (int rep = 0; rep < 10; ++rep) {
      const int n = 40;
      Eigen::MatrixXd a(n, n);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j)
          a(i, j) = a(j, i) =
              rng.normal(static_cast<uint64_t>(rep) * n * n + static_cast<uint64_t>(i) * n + j);
      a.diagonal().array() -= 1.0;  // guarantee some negative spectrum
      SymMatrix sm;
      sm.n = n;
      sm.stated_support_radius = 1e9;
      sm.mat = a.sparseView();
      const Factorization f = factorize(sm, /*pd_attempt_first=*/false);
      const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
      double want = 0.0;
      int rank = 0;
      for (int i = 0; i < n; ++i)
        if (es.eigenvalues()[i] > f.pd_tol()) {
          want += std::log(es.eigenvalues()[i]);
          ++rank;
        }
      worst = std::max(worst, std::abs(f.log_det_plus() - want) /
                                  std::max(1.0, std::abs(want)));
      c.require(f.rank_positive() == rank, "positive rank mismatch");
    }
    c.require(worst <= 1e-9, "det_+ deviation " + fmt(worst));
    c.note("det_+ rel deviation " + fmt(worst));
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<const char*, std::function<Check()>>> criteria = {
      {1, {"special functions: quadrature matches closed forms (<= 1e-10)", criterion1}},
      {2, {"parameter derivatives match finite differences", criterion2}},
      {3, {"eventual positive-definiteness of approximation matrices", criterion3}},
      {4, {"uniform likelihood equivalence over the parameter box", criterion4}},
      {5, {"consistency of truncated-ML estimates across families", criterion5}},
      {6, {"asymptotic normality and ellipse coverage at n = 400", criterion6}},
      {7, {"eigenvalue floor and packing-bound ceiling", criterion7}},
      {8, {"taper approximation KL gaps and near-minimizing fits", criterion8}},
      {9, {"sparse/dense assembly, pinv, det_+ oracle equivalences", criterion9}},
  };

  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& [num, entry] : criteria) {
    if (!wanted.empty() && !wanted.count(num)) continue;
    const auto start = std::chrono::steady_clock::now();
    Check result;
    try {
      result = entry.second();
    } catch (const std::exception& e) {
      result.ok = false;
      result.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %d: %s (%.1f s)%s%s\n", result.ok ? "PASS" : "FAIL", num,
                entry.first, secs, result.detail.empty() ? "" : " -- ",
                result.detail.c_str());
    std::fflush(stdout);
    if (!result.ok) ++failures;
  }
  return failures;
}
