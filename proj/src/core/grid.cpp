#include "core/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/celllist.hpp"
#include "core/rng.hpp"

namespace gwfit {

double SiteSet::distance(int i, int j) const {
  const double* a = site(i);
  const double* b = site(j);
  double s = 0.0;
  for (int k = 0; k < dim; ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

namespace {

// Append the shell {1..I}^d \ {1..I-1}^d in lexicographic order.
void append_shell(int d, int I, int limit, std::vector<int>& out) {
  std::vector<int> idx(d, 1);
  while (true) {
    if (*std::max_element(idx.begin(), idx.end()) == I) {
      for (int k = 0; k < d; ++k) {
        out.push_back(idx[k]);
        if (static_cast<int>(out.size()) == limit * d) return;
      }
    }
    int k = d - 1;
    for (; k >= 0; --k) {
      if (++idx[k] <= I) break;
      idx[k] = 1;
    }
    if (k < 0) return;
  }
}

}  // namespace

SiteSet generate(const GridSpec& spec) {
  spec.validate();
  SiteSet s;
  s.dim = spec.dim;
  s.n = spec.n;
  s.tau = spec.tau;
  s.seed = spec.seed;

  std::vector<int> anchors;
  anchors.reserve(static_cast<size_t>(spec.n) * spec.dim);
  for (int I = 1; static_cast<int>(anchors.size()) < spec.n * spec.dim; ++I)
    append_shell(spec.dim, I, spec.n, anchors);

  const CounterRng rng(spec.seed, /*stream=*/0);
  s.coords.resize(static_cast<size_t>(spec.n) * spec.dim);
  for (int i = 0; i < spec.n; ++i)
    for (int k = 0; k < spec.dim; ++k) {
      const size_t idx = static_cast<size_t>(i) * spec.dim + k;
      s.coords[idx] = anchors[idx] + spec.tau * rng.uniform_sym(idx);
    }
  return s;
}

double min_spacing(const SiteSet& sites) {
  if (sites.n < 2) throw std::domain_error("min_spacing: need at least 2 sites");

  if (sites.dim > CellList::kMaxDim) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < sites.n; ++i)
      for (int j = i + 1; j < sites.n; ++j) best = std::min(best, sites.distance(i, j));
    return best;
  }

  // Grow the cell size until some pair falls within it; a pair at distance
  // < cell is always seen by adjacent-cell enumeration, so the first hit at
  // distance <= cell is the global minimum.
  double cell = 1.0;
  for (;;) {
    const CellList cl(sites, cell);
    double best = std::numeric_limits<double>::infinity();
    cl.for_pairs_within(cell, [&](int, int, double d) { best = std::min(best, d); });
    if (best < std::numeric_limits<double>::infinity()) return best;
    cell *= 2.0;
    if (cell > 1e12) throw std::runtime_error("min_spacing: degenerate site set");
  }
}

double packing_bound(int dim, double C, double tau) {
  return std::pow(2.0, 2 * dim) * dim * std::pow(C, dim - 1) /
         std::pow(1.0 - 2.0 * tau, dim);
}

}  // namespace gwfit
