#pragma once

#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "core/grid.hpp"

namespace gwfit {

// Fixed-radius neighbor search over a SiteSet. Cells are cubes of edge
// `cell`; any pair at distance < cell lies in adjacent cells. Exact keys for
// dim <= 3 (21-bit packed integer coordinates); callers fall back to brute
// force in higher dimensions.
class CellList {
 public:
  static constexpr int kMaxDim = 3;

  CellList(const SiteSet& sites, double cell) : sites_(sites), cell_(cell) {
    for (int i = 0; i < sites.n; ++i) buckets_[key_of(sites.site(i))].push_back(i);
  }

  // All unordered pairs (i, j), i < j, with distance(i, j) < radius;
  // radius must be <= cell.
  template <class F>
  void for_pairs_within(double radius, F&& f) const {
    const int d = sites_.dim;
    std::vector<int> offs(d, -1);
    for (int i = 0; i < sites_.n; ++i) {
      int64_t base[kMaxDim] = {0, 0, 0};
      cell_coords(sites_.site(i), base);
      std::fill(offs.begin(), offs.end(), -1);
      while (true) {
        int64_t nb[kMaxDim] = {0, 0, 0};
        for (int k = 0; k < d; ++k) nb[k] = base[k] + offs[k];
        auto it = buckets_.find(pack(nb, d));
        if (it != buckets_.end()) {
          for (int j : it->second) {
            if (j <= i) continue;
            const double dist = sites_.distance(i, j);
            if (dist < radius) f(i, j, dist);
          }
        }
        int k = 0;
        for (; k < d; ++k) {
          if (++offs[k] <= 1) break;
          offs[k] = -1;
        }
        if (k == d) break;
      }
    }
  }

 private:
  void cell_coords(const double* x, int64_t* out) const {
    for (int k = 0; k < sites_.dim; ++k)
      out[k] = static_cast<int64_t>(std::floor(x[k] / cell_));
  }

  static int64_t pack(const int64_t* c, int d) {
    int64_t key = 0;
    for (int k = 0; k < d; ++k) key = (key << 21) | ((c[k] + (1 << 20)) & 0x1FFFFF);
    return key;
  }

  int64_t key_of(const double* x) const {
    int64_t c[kMaxDim] = {0, 0, 0};
    cell_coords(x, c);
    return pack(c, sites_.dim);
  }

  const SiteSet& sites_;
  double cell_;
  std::unordered_map<int64_t, std::vector<int>> buckets_;
};

}  // namespace gwfit
