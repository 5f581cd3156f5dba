#include "core/simulate.hpp"

#include "core/rng.hpp"
#include "core/threads.hpp"

namespace gwfit {

Eigen::MatrixXd simulate(const SimSpec& spec) {
  spec.validate();
  const BoundKernels bk = spec.model->bind(spec.theta0, 0);
  const SymMatrix sigma = assemble(*spec.sites, bk.value, bk.support);
  const Factorization f = factorize(sigma);
  if (!f.is_pd())
    throw NotPositiveDefiniteError(
        "simulate: covariance at theta0 is not positive-definite; simulation requires a "
        "valid covariance model");

  const int n = spec.sites->n;
  Eigen::MatrixXd out(spec.replicates, n);
  parallel_for(spec.replicates, spec.threads, [&](int r) {
    const CounterRng rng(spec.seed, static_cast<uint64_t>(r) + 1);
    Vec u(n);
    for (int i = 0; i < n; ++i) u[i] = rng.normal(i);
    out.row(r) = f.sample_transform(u).transpose();
  });
  return out;
}

}  // namespace gwfit
