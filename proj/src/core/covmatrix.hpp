#pragma once

#include <functional>
#include <memory>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "core/grid.hpp"

namespace gwfit {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// Symmetric n x n covariance (or approximation) matrix in compressed sparse
// storage; entries are structurally zero beyond stated_support_radius.
struct SymMatrix {
  int n = 0;
  double stated_support_radius = 0.0;
  SpMat mat;

  double entry(int i, int j) const { return mat.coeff(i, j); }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(mat); }
  // (i, j, value) triplet text, one entry per line, upper triangle included
  void write_triplets(const std::string& path) const;
};

enum class FactorKind { CholeskyPD, EigenIndefinite };

// Factorization with pseudo-determinant and pseudo-inverse support. det_+ is
// the product of eigenvalues above pd_tol; if no eigenvalue is positive,
// det_+ = 1 (log_det_plus = 0).
class Factorization {
 public:
  FactorKind kind() const { return kind_; }
  double log_det_plus() const { return log_det_plus_; }
  int rank_positive() const { return rank_positive_; }
  double pd_tol() const { return pd_tol_; }
  bool is_pd() const { return kind_ == FactorKind::CholeskyPD; }
  int size() const { return n_; }

  // Moore-Penrose application: exact inverse on the PD path, eigenvalue
  // truncation at |lambda| <= pd_tol otherwise.
  Vec apply_pinv(const Vec& v) const;
  Eigen::MatrixXd solve_dense(const Eigen::MatrixXd& rhs) const;

  // Lower Cholesky factor L and permutation P with Sigma = P^T L L^T P;
  // only valid on the PD path.
  Vec sample_transform(const Vec& iid_normals) const;

 private:
  friend Factorization factorize(const SymMatrix&, bool);
  FactorKind kind_ = FactorKind::CholeskyPD;
  double log_det_plus_ = 0.0;
  int rank_positive_ = 0;
  int n_ = 0;
  double pd_tol_ = 0.0;
  std::shared_ptr<Eigen::SimplicialLLT<SpMat>> llt_;
  Eigen::VectorXd evals_;
  Eigen::MatrixXd evecs_;
};

// Assemble [k(|s_i - s_j|)] over all pairs closer than support_radius via
// cell-list search; diagonal is k(0). Entries are mirrored, so the matrix is
// bit-for-bit symmetric.
SymMatrix assemble(const SiteSet& sites, const std::function<double(double)>& kernel,
                   double support_radius);

// Sparse Cholesky first (unless pd_attempt_first is false), symmetric
// eigendecomposition on failure.
Factorization factorize(const SymMatrix& mat, bool pd_attempt_first = true);

struct SpectralGapReport {
  double spec_norm_diff = 0.0;
  double lambda_min_a = 0.0, lambda_max_a = 0.0;
  double lambda_min_b = 0.0, lambda_max_b = 0.0;
};

// Extremal eigenvalues and ||A - B||_2 by power iteration.
SpectralGapReport spectral_gap_report(const SymMatrix& a, const SymMatrix& b);

namespace detail {
// Largest-magnitude eigenvalue of a symmetric operator by power iteration.
double power_method_extremal(const std::function<Vec(const Vec&)>& apply, int n,
                             double tol = 1e-10, int max_iters = 10000);
}  // namespace detail

}  // namespace gwfit
