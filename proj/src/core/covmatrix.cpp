#include "core/covmatrix.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <vector>

#include "core/celllist.hpp"
#include "core/errors.hpp"
#include "core/rng.hpp"

namespace gwfit {

void SymMatrix::write_triplets(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_triplets: cannot open " + path);
  out << "# i j value (0-based, symmetric, all stored entries)\n";
  out.precision(17);
  for (int k = 0; k < mat.outerSize(); ++k)
    for (SpMat::InnerIterator it(mat, k); it; ++it)
      out << it.row() << " " << it.col() << " " << it.value() << "\n";
}

SymMatrix assemble(const SiteSet& sites, const std::function<double(double)>& kernel,
                   double support_radius) {
  if (support_radius <= 0.0)
    throw std::invalid_argument("assemble: support_radius must be > 0");
  SymMatrix m;
  m.n = sites.n;
  m.stated_support_radius = support_radius;

  std::vector<Eigen::Triplet<double>> trips;
  const double diag = kernel(0.0);
  trips.reserve(static_cast<size_t>(sites.n) * 8);
  for (int i = 0; i < sites.n; ++i) trips.emplace_back(i, i, diag);

  if (sites.n > 1 && sites.dim <= CellList::kMaxDim) {
    const CellList cl(sites, support_radius);
    cl.for_pairs_within(support_radius, [&](int i, int j, double dist) {
      const double v = kernel(dist);
      if (v != 0.0) {
        trips.emplace_back(i, j, v);
        trips.emplace_back(j, i, v);
      }
    });
  } else if (sites.n > 1) {
    for (int i = 0; i < sites.n; ++i)
      for (int j = i + 1; j < sites.n; ++j) {
        const double dist = sites.distance(i, j);
        if (dist >= support_radius) continue;
        const double v = kernel(dist);
        if (v != 0.0) {
          trips.emplace_back(i, j, v);
          trips.emplace_back(j, i, v);
        }
      }
  }
  m.mat.resize(sites.n, sites.n);
  m.mat.setFromTriplets(trips.begin(), trips.end());
  m.mat.makeCompressed();
  return m;
}

Factorization factorize(const SymMatrix& mat, bool pd_attempt_first) {
  Factorization f;
  f.n_ = mat.n;
  if (pd_attempt_first) {
    auto llt = std::make_shared<Eigen::SimplicialLLT<SpMat>>();
    llt->compute(mat.mat);
    if (llt->info() == Eigen::Success) {
      double log_det = 0.0;
      const auto diag = llt->matrixL().nestedExpression().diagonal();
      bool ok = true;
      for (int i = 0; i < mat.n; ++i) {
        if (!(diag[i] > 0.0) || !std::isfinite(diag[i])) { ok = false; break; }
        log_det += 2.0 * std::log(diag[i]);
      }
      if (ok) {
        f.kind_ = FactorKind::CholeskyPD;
        f.log_det_plus_ = log_det;
        f.rank_positive_ = mat.n;
        f.llt_ = std::move(llt);
        return f;
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat.dense());
  if (es.info() != Eigen::Success)
    throw NumericError("factorize: symmetric eigendecomposition failed");
  f.kind_ = FactorKind::EigenIndefinite;
  f.evals_ = es.eigenvalues();
  f.evecs_ = es.eigenvectors();
  const double scale = f.evals_.cwiseAbs().maxCoeff();
  f.pd_tol_ = mat.n * std::numeric_limits<double>::epsilon() * scale;
  f.log_det_plus_ = 0.0;
  f.rank_positive_ = 0;
  for (int i = 0; i < mat.n; ++i) {
    if (f.evals_[i] > f.pd_tol_) {
      f.log_det_plus_ += std::log(f.evals_[i]);
      ++f.rank_positive_;
    }
  }
  return f;
}

Vec Factorization::apply_pinv(const Vec& v) const {
  if (v.size() != n_) throw std::invalid_argument("apply_pinv: dimension mismatch");
  if (kind_ == FactorKind::CholeskyPD) return llt_->solve(v);
  Vec w = evecs_.transpose() * v;
  for (int i = 0; i < n_; ++i)
    w[i] = (std::abs(evals_[i]) > pd_tol_) ? w[i] / evals_[i] : 0.0;
  return evecs_ * w;
}

Eigen::MatrixXd Factorization::solve_dense(const Eigen::MatrixXd& rhs) const {
  if (rhs.rows() != n_) throw std::invalid_argument("solve_dense: dimension mismatch");
  if (kind_ == FactorKind::CholeskyPD) return llt_->solve(rhs);
  Eigen::MatrixXd w = evecs_.transpose() * rhs;
  for (int i = 0; i < n_; ++i) {
    const double g = (std::abs(evals_[i]) > pd_tol_) ? 1.0 / evals_[i] : 0.0;
    w.row(i) *= g;
  }
  return evecs_ * w;
}

Vec Factorization::sample_transform(const Vec& iid_normals) const {
  if (kind_ != FactorKind::CholeskyPD)
    throw std::logic_error("sample_transform: factorization is not positive-definite");
  if (iid_normals.size() != n_)
    throw std::invalid_argument("sample_transform: dimension mismatch");
  Vec y = llt_->matrixL() * iid_normals;
  return llt_->permutationPinv() * y;
}

namespace detail {

double power_method_extremal(const std::function<Vec(const Vec&)>& apply, int n,
                             double tol, int max_iters) {
  const CounterRng rng(0x5eedu, 17);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal(i);
  v.normalize();
  double lambda = 0.0;
  for (int it = 0; it < max_iters; ++it) {
    Vec w = apply(v);
    const double norm = w.norm();
    if (norm < 1e-300) return 0.0;  // operator is (numerically) zero on v
    w /= norm;
    const double next = w.dot(apply(w));
    if (std::abs(next - lambda) <= tol * std::max(1.0, std::abs(next)) && it > 2)
      return next;
    lambda = next;
    v = std::move(w);
  }
  throw NumericError("power iteration did not converge", max_iters);
}

}  // namespace detail

SpectralGapReport spectral_gap_report(const SymMatrix& a, const SymMatrix& b) {
  if (a.n != b.n) throw std::invalid_argument("spectral_gap_report: dimension mismatch");
  const int n = a.n;
  SpectralGapReport rep;

  auto extremals = [n](const SpMat& m, double& lo, double& hi) {
    auto apply = [&m](const Vec& v) { return Vec(m * v); };
    const double e1 = detail::power_method_extremal(apply, n);
    auto shifted = [&m, e1](const Vec& v) { return Vec(m * v - e1 * v); };
    const double e2 = e1 + detail::power_method_extremal(shifted, n);
    lo = std::min(e1, e2);
    hi = std::max(e1, e2);
  };
  extremals(a.mat, rep.lambda_min_a, rep.lambda_max_a);
  extremals(b.mat, rep.lambda_min_b, rep.lambda_max_b);

  auto diff = [&](const Vec& v) { return Vec(a.mat * v - b.mat * v); };
  rep.spec_norm_diff = std::abs(detail::power_method_extremal(diff, n));
  return rep;
}

}  // namespace gwfit
