#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace gwfit {

struct GridSpec {
  int dim = 1;
  double tau = 0.0;     // perturbation radius, in [0, 1/2)
  int n = 1;            // number of sites
  uint64_t seed = 0;

  void validate() const {
    if (dim < 1) throw std::invalid_argument("GridSpec: dim must be >= 1");
    if (!(tau >= 0.0 && tau < 0.5))
      throw std::invalid_argument("GridSpec: tau must be in [0, 1/2)");
    if (n < 1) throw std::invalid_argument("GridSpec: n must be >= 1");
  }
  // guaranteed minimal spacing 1 - 2 tau
  double spacing_floor() const { return 1.0 - 2.0 * tau; }
};

// n perturbed-grid locations in R^dim. Immutable after generation; pairwise
// distances of distinct sites are >= 1 - 2 tau by construction.
struct SiteSet {
  int dim = 0;
  int n = 0;
  double tau = 0.0;
  uint64_t seed = 0;
  std::vector<double> coords;  // row-major, n x dim

  const double* site(int i) const { return coords.data() + static_cast<size_t>(i) * dim; }
  double distance(int i, int j) const;
};

// Anchor points enumerate {1..I}^dim shell by shell (I = 1, 2, ...),
// lexicographically within each shell; perturbations are i.i.d. uniform on
// [-1,1]^dim scaled by tau. Deterministic in the seed.
SiteSet generate(const GridSpec& spec);

// Exact minimum pairwise distance via cell-list search (grows the cell size
// until a pair is found, so it is exact for arbitrary site sets).
double min_spacing(const SiteSet& sites);

// Uniform cap on the number of sites within distance C of any fixed site:
// 2^(2d) d C^(d-1) / (1-2 tau)^d.
double packing_bound(int dim, double C, double tau);

}  // namespace gwfit
