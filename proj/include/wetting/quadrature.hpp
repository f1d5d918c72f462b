#pragma once

#include <span>
#include <vector>

namespace wetting::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [lo, hi].
Rule gauss_legendre(int n, double lo = -1.0, double hi = 1.0);

/// Barycentric weights for Lagrange interpolation through `nodes`.
std::vector<double> barycentric_weights(std::span<const double> nodes);

/// Values of the Lagrange basis polynomials at x, written to `out`.
void lagrange_basis(std::span<const double> nodes, std::span<const double> bary, double x,
                    std::span<double> out);

}  // namespace wetting::quad
