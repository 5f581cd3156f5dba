#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <set>

#include "core/grid.hpp"
#include "core/io.hpp"
#include "oracles.hpp"

using namespace gwfit;

TEST_CASE("tau = 0 degenerates to the integer grid in shell order") {
  const SiteSet s = generate({2, 0.0, 4, 123});
  REQUIRE(s.n == 4);
  // shell I=1: (1,1); shell I=2 lexicographic: (1,2), (2,1), (2,2)
  CHECK(s.site(0)[0] == 1.0);
  CHECK(s.site(0)[1] == 1.0);
  CHECK(s.site(1)[0] == 1.0);
  CHECK(s.site(1)[1] == 2.0);
  CHECK(s.site(2)[0] == 2.0);
  CHECK(s.site(2)[1] == 1.0);
  CHECK(s.site(3)[0] == 2.0);
  CHECK(s.site(3)[1] == 2.0);
}

TEST_CASE("complete shells enumerate {1..I}^d exactly") {
  const int I = 3, d = 2;
  const SiteSet s = generate({d, 0.0, I * I, 9});
  std::set<std::pair<int, int>> got;
  for (int i = 0; i < s.n; ++i)
    got.insert({static_cast<int>(s.site(i)[0]), static_cast<int>(s.site(i)[1])});
  CHECK(got.size() == static_cast<size_t>(I * I));
  for (int a = 1; a <= I; ++a)
    for (int b = 1; b <= I; ++b) CHECK(got.count({a, b}) == 1);
}

TEST_CASE("perturbations stay within tau of the anchors; spacing floor holds") {
  const SiteSet s = generate({1, 0.25, 3, 777});
  for (int i = 0; i < 3; ++i) {
    CHECK(s.site(i)[0] >= i + 1 - 0.25);
    CHECK(s.site(i)[0] <= i + 1 + 0.25);
  }
  CHECK(min_spacing(s) >= 0.5 - 1e-12);
}

TEST_CASE("same spec twice gives identical coordinates") {
  const GridSpec spec{3, 0.3, 50, 2024};
  const SiteSet a = generate(spec), b = generate(spec);
  CHECK(a.coords == b.coords);
  const SiteSet c = generate({3, 0.3, 50, 2025});
  CHECK(a.coords != c.coords);
}

TEST_CASE("minimal spacing 1 - 2 tau over many seeds and dimensions") {
  for (int d : {1, 2, 3}) {
    for (uint64_t seed = 0; seed < 1000; seed += 1) {
      const double tau = 0.35;
      const SiteSet s = generate({d, tau, 40, seed});
      CHECK(min_spacing(s) >= 1.0 - 2.0 * tau - 1e-12);
    }
  }
}

TEST_CASE("min_spacing equals the all-pairs oracle") {
  for (uint64_t seed = 1; seed <= 50; ++seed) {
    const SiteSet s = generate({2, 0.45, 200, seed});
    CHECK(min_spacing(s) == doctest::Approx(oracle::brute_min_spacing(s)).epsilon(1e-14));
  }
  const SiteSet tight = generate({1, 0.0, 5, 3});
  CHECK(min_spacing(tight) == 1.0);
  SiteSet one;
  one.dim = 1;
  one.n = 1;
  one.coords = {1.0};
  CHECK_THROWS_AS(min_spacing(one), std::domain_error);
}

TEST_CASE("packing bound caps the neighbor counts") {
  CHECK(packing_bound(2, 2.0, 0.0) == doctest::Approx(64.0));
  for (double C : {1.0, 2.0, 5.0}) {
    const double tau = 0.3;
    const SiteSet s = generate({2, tau, 400, 99});
    const double bound = packing_bound(2, C, tau);
    for (int i = 0; i < s.n; ++i) {
      int count = 0;
      for (int j = 0; j < s.n; ++j)
        if (j != i && s.distance(i, j) <= C) ++count;
      CHECK(count <= bound);
    }
  }
}

TEST_CASE("invalid specs are rejected") {
  CHECK_THROWS_AS(generate({2, 0.5, 10, 1}), std::invalid_argument);
  CHECK_THROWS_AS(generate({2, -0.1, 10, 1}), std::invalid_argument);
  CHECK_THROWS_AS(generate({0, 0.1, 10, 1}), std::invalid_argument);
  CHECK_THROWS_AS(generate({2, 0.1, 0, 1}), std::invalid_argument);
}

TEST_CASE("csv and binary round trips") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "gwfit_grid_io";
  fs::create_directories(dir);
  const SiteSet s = generate({3, 0.2, 37, 5150});

  const std::string csv = (dir / "sites.csv").string();
  write_sites_csv(s, csv);
  const SiteSet r1 = read_sites_csv(csv, s.tau, s.seed);
  REQUIRE(r1.n == s.n);
  REQUIRE(r1.dim == s.dim);
  for (size_t i = 0; i < s.coords.size(); ++i)
    CHECK(r1.coords[i] == doctest::Approx(s.coords[i]).epsilon(1e-15));

  const std::string bin = (dir / "sites.bin").string();
  write_sites_binary(s, bin);
  const SiteSet r2 = read_sites_binary(bin);
  CHECK(r2.n == s.n);
  CHECK(r2.dim == s.dim);
  CHECK(r2.tau == s.tau);
  CHECK(r2.seed == s.seed);
  CHECK(r2.coords == s.coords);  // binary is bit-exact
}
