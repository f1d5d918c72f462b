#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "wetting/error.hpp"
#include "wetting/oracle.hpp"

using namespace wetting;
using doctest::Approx;

namespace {

const InteractionPotential kSos = InteractionPotential::sos();
const InteractionPotential kGauss = InteractionPotential::gaussian();

QuadratureSpec quad_for(const InteractionPotential& psi) { return QuadratureSpec::defaults_for(psi); }

}  // namespace

TEST_CASE("quadrature spec") {
  CHECK(quad_for(kSos).cutoff == 40.0);
  CHECK(quad_for(kGauss).cutoff == 12.0);
  CHECK(QuadratureSpec::defaults_for(kGauss, 64).cutoff == 44.0);
  CHECK(QuadratureSpec::defaults_for(kSos, 64).cutoff == 62.0);
  QuadratureSpec q;
  q.cutoff = 5.0;
  CHECK_THROWS_AS(validate(q), ParameterError);
}

TEST_CASE("chain oracle closed forms for one site") {
  const auto z0 = exact_z_chain(1, kSos, NoPinning{}, quad_for(kSos));
  CHECK(z0.z == Approx(0.5).epsilon(1e-13));
  CHECK(z0.rho == 0.0);
  for (double eps : {0.05, 0.5, 2.0}) {
    const auto r = exact_z_chain(1, kSos, DeltaPinning{eps}, quad_for(kSos));
    CHECK(r.z == Approx(0.5 + eps).epsilon(1e-13));
    CHECK(r.rho == Approx(eps / (0.5 + eps)).epsilon(1e-13));
  }
  CHECK(exact_z_chain(1, kSos, DeltaPinning{0.5}, quad_for(kSos)).rho == Approx(0.5).epsilon(1e-14));
  CHECK(exact_z_chain(1, kGauss, NoPinning{}, quad_for(kGauss)).z ==
        Approx(std::sqrt(std::numbers::pi) / 2.0).epsilon(1e-13));
  // Square well on one SOS site: Z = int_0^a e^{b-2t} + int_a^inf e^{-2t}.
  const double a = 0.3, b = 1.2;
  const double zw = std::exp(b) * (1 - std::exp(-2 * a)) / 2 + std::exp(-2 * a) / 2;
  const auto w = exact_z_chain(1, kSos, SquareWell{a, b}, quad_for(kSos));
  CHECK(w.z == Approx(zw).epsilon(1e-12));
  CHECK(w.rho == Approx(std::exp(b) * (1 - std::exp(-2 * a)) / 2 / zw).epsilon(1e-12));
}

TEST_CASE("chain oracle: two sites in closed form") {
  // SOS, N=2: Z(0) = int int e^{-x-y-|x-y|} = 1/2, and pinning one site
  // leaves int e^{-2y} = 1/2, so Z(eps) = 1/2 + eps + eps^2.
  const auto r = exact_z_chain(2, kSos, NoPinning{}, quad_for(kSos));
  CHECK(r.z == Approx(0.5).epsilon(1e-12));
  for (double eps : {0.1, 0.5, 1.0}) {
    const auto p = exact_z_chain(2, kSos, DeltaPinning{eps}, quad_for(kSos));
    const double z = 0.5 + eps + eps * eps;
    CHECK(p.z == Approx(z).epsilon(1e-12));
    CHECK(p.rho == Approx((eps + 2 * eps * eps) / (2 * z)).epsilon(1e-12));
  }
}

TEST_CASE("chain oracle refuses bad input") {
  CHECK_THROWS_AS(exact_z_chain(65, kSos, NoPinning{}, quad_for(kSos)), ParameterError);
  CHECK_THROWS_AS(exact_z_chain(0, kSos, NoPinning{}, quad_for(kSos)), ParameterError);
  QuadratureSpec strict = quad_for(kSos);
  strict.cutoff = 10.0;
  CHECK_THROWS_AS(exact_z_chain(20, kSos, SquareWell{0.37, 1.0}, strict), QuadratureError);
}

TEST_CASE("pin marginals sum to |Lambda| rho") {
  for (const auto* psi : {&kSos, &kGauss}) {
    for (int n : {1, 3, 8, 20}) {
      const auto r =
          exact_z_chain(n, *psi, DeltaPinning{0.3}, QuadratureSpec::defaults_for(*psi, n));
      const double sum = std::accumulate(r.pin_marginals.begin(), r.pin_marginals.end(), 0.0);
      CHECK(sum == Approx(n * r.rho).epsilon(1e-9));
      CHECK(r.rho > 0.0);
      CHECK(r.rho < 1.0);
      // Reflection symmetry of the chain.
      CHECK(r.pin_marginals.front() == Approx(r.pin_marginals.back()).epsilon(1e-10));
    }
  }
}

TEST_CASE("direct pinned mass agrees with the log-derivative of Z") {
  for (const auto* psi : {&kSos, &kGauss}) {
    for (int n : {1, 2, 3, 6}) {
      for (double eps : {0.05, 0.5}) {
        const double direct = exact_z_chain(n, *psi, DeltaPinning{eps}, quad_for(*psi)).rho;
        CHECK(rho_by_log_derivative(n, *psi, eps, quad_for(*psi)) ==
              Approx(direct).epsilon(1e-7));
      }
    }
  }
  CHECK(rho_by_log_derivative(3, kSos, 0.0, quad_for(kSos)) == 0.0);
}

TEST_CASE("subset expansion reproduces the chain oracle") {
  for (const auto* psi : {&kSos, &kGauss}) {
    const auto q = quad_for(*psi);
    for (int n : {1, 2, 3, 5}) {
      const Lattice lat = build_lattice(1, n);
      for (double eps : {0.0, 0.05, 0.5, 1.0}) {
        const auto c = exact_z_chain(n, *psi, DeltaPinning{eps}, q);
        const auto s = exact_z_subset_expansion(lat, *psi, eps, q);
        CAPTURE(n);
        CAPTURE(eps);
        CHECK(s.z == Approx(c.z).epsilon(1e-8));
        CHECK(s.rho == Approx(c.rho).epsilon(1e-7).scale(1e-3));
        for (std::size_t x = 0; x < lat.size(); ++x) {
          CHECK(s.pin_marginals[x] == Approx(c.pin_marginals[x]).epsilon(1e-7).scale(1e-3));
        }
      }
    }
  }
  // One-site box in d=2 is a site with four outside bonds: Z = 1/4 + eps (SOS).
  const auto one = exact_z_subset_expansion(build_lattice(2, 1), kSos, 0.3, quad_for(kSos));
  CHECK(one.z == Approx(0.25 + 0.3).epsilon(1e-9));
}

TEST_CASE("subset expansion in d=2") {
  const Lattice sq = build_lattice(2, 2);
  QuadratureSpec q = quad_for(kSos);
  const SubsetExpansion exp(sq, kSos, q);
  // Regression fixture: Z_{2x2}(0) = 11/768 for SOS.
  CHECK(std::exp(exp.log_z_subset(0)) == Approx(11.0 / 768.0).epsilon(1e-8));
  // Fully clamped box: Z = 1.
  CHECK(exp.log_z_subset(0b1111) == Approx(0.0).scale(1.0));
  const auto r = exp.evaluate(0.1);
  CHECK(r.rho > 0.0);
  CHECK(r.rho < 1.0);
  CHECK(r.z == Approx(std::exp(exp.log_z_subset(0)) + 4 * 0.1 * std::exp(exp.log_z_subset(1)) +
                     4 * 0.01 * std::exp(exp.log_z_subset(0b0011)) +
                     2 * 0.01 * std::exp(exp.log_z_subset(0b1001)) +
                     4 * 0.001 * std::exp(exp.log_z_subset(0b0111)) + 1e-4)
                  .epsilon(1e-12));
  const double sum = std::accumulate(r.pin_marginals.begin(), r.pin_marginals.end(), 0.0);
  CHECK(sum == Approx(4 * r.rho).epsilon(1e-9));
  // All four sites of the 2x2 box are equivalent.
  for (double m : r.pin_marginals) CHECK(m == Approx(r.rho).epsilon(1e-9));

  CHECK_THROWS_AS(SubsetExpansion(build_lattice(2, 4), kSos, q), QuadratureError);
  CHECK_THROWS_AS(SubsetExpansion(build_lattice(3, 2), kSos, q), QuadratureError);
  CHECK_THROWS_AS(SubsetExpansion(build_lattice(1, 10), kSos, q), QuadratureError);
  const SubsetExpansion empty_only(sq, kSos, q, true);
  CHECK_THROWS_AS(empty_only.evaluate(0.1), UsageError);
}

TEST_CASE("integral identity") {
  // One site: both sides equal log(1 + 2 eps).
  CHECK(check_integral_identity(1, kSos, 0.5, 11, quad_for(kSos)) < 1e-12);
  CHECK(check_integral_identity(1, kSos, 0.0, 1, quad_for(kSos)) == 0.0);
  for (int n : {2, 3}) {
    CHECK(check_integral_identity(n, kSos, 0.5, 11, quad_for(kSos)) < 1e-6);
    CHECK(check_integral_identity(n, kGauss, 0.5, 11, quad_for(kGauss)) < 1e-6);
  }
}

TEST_CASE("lower bound on Z") {
  CHECK(check_lower_bound_z(build_lattice(1, 1), kSos, 0.5, quad_for(kSos)) ==
        Approx(std::log(1.0) - std::log(0.5)));
  CHECK(check_lower_bound_z(build_lattice(1, 3), kSos, 1.0, quad_for(kSos)) > 0.0);
  CHECK(check_lower_bound_z(build_lattice(2, 2), kGauss, 0.3, quad_for(kGauss)) > 0.0);
  CHECK(check_lower_bound_z(build_lattice(1, 20), kSos, 0.3, quad_for(kSos)) > 0.0);
}

TEST_CASE("rho is monotone in epsilon") {
  std::vector<double> grid;
  for (int i = 1; i <= 20; ++i) grid.push_back(0.05 * i);
  for (int n : {1, 2, 3}) {
    const auto m = check_rho_monotone(n, kSos, grid, quad_for(kSos));
    CHECK(m.monotone);
    CHECK(m.table.size() == grid.size());
  }
  const auto one = check_rho_monotone(1, kSos, grid, quad_for(kSos));
  for (const auto& [eps, rho] : one.table) CHECK(rho == Approx(eps / (eps + 0.5)).epsilon(1e-12));
  for (std::size_t i = 1; i < one.table.size(); ++i) CHECK(one.table[i].second > one.table[i - 1].second);
  const double single[] = {0.3};
  CHECK(check_rho_monotone(2, kSos, single, quad_for(kSos)).monotone);
}

TEST_CASE("snake path cap bounds the free energy of small boxes") {
  for (const auto* psi : {&kSos, &kGauss}) {
    for (int n = 1; n <= 6; ++n) {
      const Lattice lat = build_lattice(1, n);
      const double f = exact_z_chain(n, *psi, NoPinning{}, quad_for(*psi)).log_z / n;
      CHECK(f <= snake_log_cap(lat, *psi));
    }
    for (int n = 1; n <= 3; ++n) {
      const Lattice lat = build_lattice(2, n);
      const SubsetExpansion exp(lat, *psi, quad_for(*psi), true);
      const double f = exp.log_z_subset(0) / static_cast<double>(lat.size());
      CHECK(f <= snake_log_cap(lat, *psi));
    }
  }
  CHECK(snake_log_cap(build_lattice(1, 1), kSos) == 0.0);
  CHECK(snake_log_cap(build_lattice(2, 3), kGauss) ==
        Approx((std::log(std::sqrt(std::numbers::pi / 2)) + 8 * std::log(std::sqrt(2 * std::numbers::pi))) / 9));
}
