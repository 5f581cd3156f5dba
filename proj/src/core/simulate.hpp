#pragma once

#include <cstdint>

#include "core/likelihood.hpp"

namespace gwfit {

struct SimSpec {
  const SiteSet* sites = nullptr;
  const RadialModel* model = nullptr;
  Theta theta0 = Theta::Zero();
  int replicates = 1;
  uint64_t seed = 0;
  int threads = 1;

  void validate() const {
    if (!sites || !model) throw std::invalid_argument("SimSpec: missing sites/model");
    if (replicates < 1) throw std::invalid_argument("SimSpec: replicates must be >= 1");
  }
};

// Zero-mean Gaussian observations at the sites under the model at theta0:
// each row is one replicate L u with L the sparse Cholesky factor and u
// standard normal from a per-replicate counter stream. Errors out when the
// covariance at theta0 is not positive-definite.
Eigen::MatrixXd simulate(const SimSpec& spec);

}  // namespace gwfit
