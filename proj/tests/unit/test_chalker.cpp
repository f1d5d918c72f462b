#include <doctest.h>

#include <random>

#include "wetting/chalker.hpp"
#include "wetting/error.hpp"

using namespace wetting;
using doctest::Approx;

namespace {

FieldConfig make_config(std::initializer_list<double> heights) {
  FieldConfig cfg(heights.size());
  std::copy(heights.begin(), heights.end(), cfg.heights.begin());
  return cfg;
}

std::int64_t at_most(const FieldConfig& cfg, double t) {
  return std::count_if(cfg.heights.begin(), cfg.heights.end(), [t](double h) { return h <= t; });
}

}  // namespace

TEST_CASE("map_t") {
  const FieldConfig t = map_t(make_config({0.05, 3.0}), 0.1);
  CHECK(t.heights[0] == 0.05);
  CHECK(t.heights[1] == Approx(2.9));
  const FieldConfig low = make_config({0.0, 0.03, 0.1});
  CHECK(map_t(low, 0.1).heights == low.heights);
}

TEST_CASE("map_s") {
  const FieldConfig s = map_s(make_config({0.5, 2.0}));
  CHECK(s.heights[0] == 0.0);
  CHECK(s.heights[1] == 1.0);
  CHECK(s.pinned[0] == 1);
  CHECK(s.pinned[1] == 0);
  const FieldConfig all = map_s(make_config({0.2, 1.0, 0.0}));
  for (double h : all.heights) CHECK(h == 0.0);
}

TEST_CASE("map counting properties on random configs") {
  std::mt19937_64 gen(17);
  std::exponential_distribution<double> exp(1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 10000; ++trial) {
    FieldConfig cfg(9);
    for (double& h : cfg.heights) h = unif(gen) < 0.3 ? 0.3 * unif(gen) : exp(gen);
    const double a = 0.05 + 0.5 * unif(gen);
    const FieldConfig t = map_t(cfg, a);
    const FieldConfig s = map_s(cfg);
    CHECK(at_most(t, a) >= at_most(cfg, 2.0 * a));
    CHECK(std::count(s.heights.begin(), s.heights.end(), 0.0) == at_most(cfg, 1.0));
    for (std::size_t x = 0; x < cfg.size(); ++x) {
      CHECK(t.heights[x] >= 0.0);
      CHECK(s.heights[x] >= 0.0);
    }
    if (in_c_m(cfg, a, 4)) CHECK(at_most(t, a) >= 4);
    if (in_d_m(cfg, 4)) CHECK(in_b_m(s, DeltaPinning{0.1}, 4));
  }
}

TEST_CASE("stratification") {
  const FieldConfig cfg = make_config({0.0, 0.1, 0.15, 0.2, 0.3, 1.0});
  const StratifiedConfig w = stratify_square_well(cfg, 0.1);
  CHECK(w.b_size == 2);
  CHECK(w.a_size == 4);
  FieldConfig d = make_config({0.0, 0.0, 0.5, 1.0, 1.5});
  d.pinned[0] = 1;
  const StratifiedConfig s = stratify_delta(d);
  CHECK(s.b_size == 1);
  CHECK(s.a_size == 4);
  for (std::size_t x = 0; x < d.size(); ++x) CHECK(s.in_a[x] >= s.in_b[x]);
}

TEST_CASE("T inequality examples") {
  const Lattice two = build_lattice(1, 2);
  const auto c = check_t_inequality(two, make_config({0.05, 3.0}), 0.1);
  CHECK(c.slack == Approx(0.2));
  CHECK_FALSE(c.violated());
  for (int d = 1; d <= 2; ++d) {
    for (int n = 1; n <= 4; ++n) {
      const Lattice lat = build_lattice(d, n);
      const double a = 0.1;
      const double slack = check_t_inequality(lat, FieldConfig(lat.size()), a).slack;
      CHECK(slack == Approx(a * static_cast<double>(lat.outside_bond_total()) +
                            2.0 * d * a * static_cast<double>(lat.size())));
      CHECK(slack > 0.0);
    }
  }
}

TEST_CASE("S inequality (SOS) examples") {
  const auto c = check_s_inequality_sos(build_lattice(1, 1), make_config({2.5}));
  CHECK(c.slack == Approx(0.0).scale(1.0));
  CHECK_FALSE(c.violated());
  const Lattice lat = build_lattice(2, 3);
  CHECK(check_s_inequality_sos(lat, FieldConfig(9)).slack ==
        Approx(static_cast<double>(lat.outside_bond_total()) + 4.0 * 9));
}

TEST_CASE("S inequality (Gaussian) examples") {
  const auto c = check_s_inequality_gauss(build_lattice(2, 1), make_config({3.0}));
  CHECK(c.slack == Approx(8.0));
  const Lattice lat = build_lattice(2, 4);
  CHECK(check_s_inequality_gauss(lat, FieldConfig(16)).slack == Approx(2.0 * 12 + 8.0 * 16));
  CHECK_THROWS_AS(check_s_inequality_gauss(build_lattice(1, 3), make_config({1, 2, 3})),
                  UsageError);
}

TEST_CASE("boundary sum X") {
  const Lattice lat = build_lattice(1, 3);
  const FieldConfig cfg = make_config({1.0, 5.0, 2.0});
  CHECK(boundary_sum_x(lat, cfg, {0, 0, 0}) == 6.0);
  CHECK(boundary_sum_x(lat, cfg, {1, 1, 1}) == 0.0);
  CHECK(boundary_sum_x(lat, FieldConfig(3), {0, 1, 0}) == 0.0);
  // A = {middle}: both remaining sites touch W twice (exterior and A).
  CHECK(boundary_sum_x(lat, cfg, {0, 1, 0}) == 2.0 * (2 * 1.0 + 2 * 2.0));
  CHECK(boundary_size_w(lat, {0, 0, 0}) == 2);
  CHECK(boundary_size_w(lat, {0, 1, 0}) == 3);
  CHECK(boundary_size_w(lat, {1, 1, 1}) == 0);
}

TEST_CASE("inequalities hold at thresholds") {
  const Lattice lat = build_lattice(2, 3);
  const double a = 0.1;
  for (double base : {a, 2 * a, 1.0}) {
    for (double nudge : {-1e-12, 0.0, 1e-12}) {
      FieldConfig cfg(9, base + nudge);
      cfg.heights[4] = 3.7;
      CHECK_FALSE(check_t_inequality(lat, cfg, a).violated());
      CHECK_FALSE(check_s_inequality_sos(lat, cfg).violated());
      CHECK_FALSE(check_s_inequality_gauss(lat, cfg).violated());
    }
  }
}

TEST_CASE("verify_chalker finds no violations") {
  VerifyOptions opt;
  opt.random_configs = 20000;
  opt.adversarial_configs = 1000;
  const auto rows = verify_chalker(opt);
  CHECK(rows.size() == 5);
  for (const auto& row : rows) {
    CAPTURE(row.name);
    CHECK(row.configs == 21000);
    CHECK(row.violations == 0);
  }
}

TEST_CASE("boundary moment") {
  const Lattice lat = build_lattice(2, 4);
  std::vector<Site> all(lat.size());
  for (Site x = 0; x < lat.size(); ++x) all[x] = x;
  const Estimate zero = check_boundary_moment(lat, all, {});
  CHECK(zero.value == 0.0);
  CHECK(*zero.standard_error == 0.0);

  MomentBudget budget{6000, 1000, 3};
  const Lattice big = build_lattice(2, 8);
  const Estimate free = check_boundary_moment(big, {}, budget);
  CHECK(free.value > 0.0);
  REQUIRE(free.standard_error.has_value());
  std::vector<Site> checker;
  for (Site x = 0; x < big.size(); ++x)
    if (big.color(x) == 0) checker.push_back(x);
  const Estimate clamped = check_boundary_moment(big, checker, budget);
  CHECK(clamped.value > 0.0);
  CHECK(clamped.value < 10.0);
  CHECK(*clamped.standard_error < 0.2 * clamped.value);
  CHECK_THROWS_AS(check_boundary_moment(build_lattice(1, 4), {}, budget), UsageError);
}
