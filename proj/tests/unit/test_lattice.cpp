#include <doctest.h>

#include <algorithm>
#include <set>

#include "wetting/error.hpp"
#include "wetting/lattice.hpp"

using namespace wetting;

namespace {

std::size_t brute_force_boundary(const Lattice& lat) {
  std::size_t count = 0;
  for (Site x = 0; x < lat.size(); ++x) {
    const auto c = lat.coords(x);
    bool edge = false;
    for (int k = 0; k < lat.dim(); ++k) edge = edge || c[k] == 0 || c[k] == lat.side() - 1;
    count += edge ? 1 : 0;
  }
  return count;
}

}  // namespace

TEST_CASE("build_lattice geometry") {
  const Lattice chain = build_lattice(1, 3);
  CHECK(chain.size() == 3);
  CHECK(chain.neighbors(1).size() == 2);
  CHECK(chain.outside_bonds(1) == 0);
  CHECK(chain.neighbors(0).size() == 1);
  CHECK(chain.outside_bonds(0) == 1);
  CHECK(chain.outside_bonds(2) == 1);

  const Lattice single = build_lattice(2, 1);
  CHECK(single.size() == 1);
  CHECK(single.neighbors(0).empty());
  CHECK(single.outside_bonds(0) == 4);

  const Lattice square = build_lattice(2, 4);
  CHECK(square.size() == 16);
  CHECK(boundary_sites(square).size() == 12);
  CHECK(boundary_sites(square).size() == brute_force_boundary(square));
}

TEST_CASE("build_lattice rejects bad input") {
  CHECK_THROWS_AS(build_lattice(0, 3), ParameterError);
  CHECK_THROWS_AS(build_lattice(4, 3), ParameterError);
  CHECK_THROWS_AS(build_lattice(2, 0), ParameterError);
}

TEST_CASE("lattice invariants for all small boxes") {
  for (int d = 1; d <= 3; ++d) {
    for (int n = 1; n <= 6; ++n) {
      const Lattice lat = build_lattice(d, n);
      std::size_t volume = 1;
      for (int k = 0; k < d; ++k) volume *= static_cast<std::size_t>(n);
      REQUIRE(lat.size() == volume);
      std::size_t outside = 0;
      for (Site x = 0; x < lat.size(); ++x) {
        CHECK(lat.neighbors(x).size() + static_cast<std::size_t>(lat.outside_bonds(x)) ==
              static_cast<std::size_t>(2 * d));
        for (Site y : lat.neighbors(x)) {
          const auto back = lat.neighbors(y);
          CHECK(std::find(back.begin(), back.end(), x) != back.end());
          CHECK(lat.adjacent(x, y));
        }
        CHECK(lat.index(lat.coords(x)) == x);
        outside += static_cast<std::size_t>(lat.outside_bonds(x));
      }
      CHECK(lat.outside_bond_total() == outside);
      CHECK(outside == static_cast<std::size_t>(2 * d) * volume / static_cast<std::size_t>(n));
    }
  }
}

TEST_CASE("boundary sizes") {
  CHECK(boundary_sites(build_lattice(1, 1)).size() == 1);
  for (int n = 1; n <= 8; ++n) {
    CHECK(boundary_sites(build_lattice(1, n)).size() == static_cast<std::size_t>(std::min(n, 2)));
  }
  CHECK(boundary_sites(build_lattice(1, 3)) == std::vector<Site>{0, 2});
  CHECK(boundary_sites(build_lattice(2, 2)).size() == 4);
  CHECK(boundary_sites(build_lattice(2, 5)).size() == 16);
  for (int n = 2; n <= 7; ++n) {
    CHECK(boundary_sites(build_lattice(2, n)).size() == static_cast<std::size_t>(4 * n - 4));
    CHECK(boundary_sites(build_lattice(3, n)).size() ==
          static_cast<std::size_t>(n * n * n - (n - 2) * (n - 2) * (n - 2)));
  }
  const Lattice lat = build_lattice(3, 4);
  for (Site x : boundary_sites(lat)) CHECK(lat.outside_bonds(x) > 0);
}

TEST_CASE("snake path examples") {
  CHECK(snake_path(build_lattice(1, 3)) == std::vector<Site>{0, 1, 2});
  const Lattice sq = build_lattice(2, 2);
  const auto path = snake_path(sq);
  CHECK(path == std::vector<Site>{0, 1, 3, 2});
}

TEST_CASE("snake path is a covering self-avoiding walk from the boundary") {
  for (int d = 1; d <= 3; ++d) {
    for (int n = 1; n <= 6; ++n) {
      const Lattice lat = build_lattice(d, n);
      const auto path = snake_path(lat);
      REQUIRE(path.size() == lat.size());
      CHECK(std::set<Site>(path.begin(), path.end()).size() == lat.size());
      CHECK(lat.outside_bonds(path.front()) > 0);
      for (std::size_t i = 1; i < path.size(); ++i) {
        CAPTURE(d);
        CAPTURE(n);
        CAPTURE(i);
        CHECK(lat.adjacent(path[i - 1], path[i]));
      }
    }
  }
}

TEST_CASE("center and colouring") {
  const Lattice lat = build_lattice(2, 8);
  const auto c = lat.coords(lat.center());
  CHECK(c[0] == 4);
  CHECK(c[1] == 4);
  for (Site x = 0; x < lat.size(); ++x)
    for (Site y : lat.neighbors(x)) CHECK(lat.color(x) != lat.color(y));
}
