#include "wetting/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "wetting/error.hpp"

namespace wetting::quad {

Rule gauss_legendre(int n, double lo, double hi) {
  if (n < 1) throw ParameterError("Gauss-Legendre order must be >= 1");
  Rule r;
  r.nodes.resize(static_cast<std::size_t>(n));
  r.weights.resize(static_cast<std::size_t>(n));
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  if (n == 1) {
    r.nodes[0] = mid;
    r.weights[0] = hi - lo;
    return r;
  }
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto a = static_cast<std::size_t>(i);
    const auto b = static_cast<std::size_t>(n - 1 - i);
    r.nodes[a] = mid - half * x;
    r.nodes[b] = mid + half * x;
    r.weights[a] = half * w;
    r.weights[b] = half * w;
  }
  return r;
}

std::vector<double> barycentric_weights(std::span<const double> nodes) {
  std::vector<double> w(nodes.size(), 1.0);
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      if (k != j) w[j] /= (nodes[j] - nodes[k]);
    }
  }
  return w;
}

void lagrange_basis(std::span<const double> nodes, std::span<const double> bary, double x,
                    std::span<double> out) {
  double denom = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const double diff = x - nodes[j];
    if (diff == 0.0) {
      for (std::size_t k = 0; k < nodes.size(); ++k) out[k] = (k == j) ? 1.0 : 0.0;
      return;
    }
    out[j] = bary[j] / diff;
    denom += out[j];
  }
  for (std::size_t j = 0; j < nodes.size(); ++j) out[j] /= denom;
}

}  // namespace wetting::quad
