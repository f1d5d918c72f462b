#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "wetting/lattice.hpp"
#include "wetting/model.hpp"

namespace wetting {

/// Discretization of the single-site height axis [0, cutoff].
struct QuadratureSpec {
  double cutoff = 40.0;
  /// Quadrature nodes per unit height near the wall.
  int nodes_per_unit = 32;
  double target_rel_error = 1e-8;

  /// cutoff 40 for SOS, 12 for Gaussian.
  static QuadratureSpec defaults_for(const InteractionPotential& psi, int side = 1);
};

void validate(const QuadratureSpec& quad);

struct ExactResult {
  double z = 0.0;
  double log_z = 0.0;
  /// Density of pinned sites (0 without pinning).
  double rho = 0.0;
  /// Per-site probability of being pinned.
  std::vector<double> pin_marginals;
  /// Per-site mean height (chain oracle only; empty otherwise).
  std::vector<double> mean_heights;
  /// Estimated relative error of z.
  double error_estimate = 0.0;
};

/// Nystrom discretization of the d = 1 transfer operator on a composite
/// Gauss-Legendre grid. The kink of Psi on the diagonal is integrated by
/// splitting the panel at the target node and interpolating.
class ChainTransfer {
 public:
  /// `pin` fixes the well geometry (SquareWell) or nothing (None/Delta).
  ChainTransfer(int side, InteractionPotential psi, const PinningSpec& pin, QuadratureSpec quad);

  /// Full evaluation. `pin` must be the construction well, or None/Delta
  /// when built without a well.
  ExactResult evaluate(const PinningSpec& pin) const;

  /// rho(eps) / eps under delta pinning, finite at eps = 0.
  double rho_over_epsilon(double eps) const;

  double log_z(double eps) const;

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Sweep;
  Sweep run(double eps, bool backward) const;

  int side_;
  InteractionPotential psi_;
  bool has_well_ = false;
  SquareWell well_{1.0, 1.0};
  std::vector<double> nodes_;     // continuous nodes; index n stands for t = 0
  std::vector<double> measure_;   // quadrature weight x well factor
  std::vector<std::uint8_t> in_well_;
  std::vector<double> matrix_;    // (n+1) x n, row-major: target i, source j
  std::vector<double> atom_col_;  // K(t_i, 0), i = 0..n
  std::vector<std::vector<double>> site_factor_;  // per site, exp(-out * Psi(t_i))
};

/// Exact Z and rho on the d = 1 chain of `side` sites (side <= 64), with
/// a quadrature error estimate from a coarser second grid. Throws
/// QuadratureError when the estimate exceeds quad.target_rel_error.
ExactResult exact_z_chain(int side, const InteractionPotential& psi, const PinningSpec& pin,
                          const QuadratureSpec& quad);

/// rho from the log-derivative of Z in epsilon (Richardson-extrapolated
/// central differences); the cross-check route for exact_z_chain.
double rho_by_log_derivative(int side, const InteractionPotential& psi, double eps,
                             const QuadratureSpec& quad);

/// log Z_{Lambda \ A} for every subset A of a box with at most 9 sites.
///
/// Each restricted partition function is a tensor-product trapezoid sum over
/// a graded height grid, eliminated site by site along a frontier, and
/// Romberg-extrapolated over successive grid halvings.
class SubsetExpansion {
 public:
  static constexpr std::size_t kMaxSites = 9;

  /// With `only_empty` set, just A = {} is computed (enough for eps = 0).
  SubsetExpansion(const Lattice& lat, const InteractionPotential& psi, const QuadratureSpec& quad,
                  bool only_empty = false);

  /// Z(eps) = sum_A eps^|A| Z_A, rho and per-site pin marginals.
  ExactResult evaluate(double eps) const;

  double log_z_subset(std::uint32_t mask) const { return log_z_[mask]; }
  double relative_error(std::uint32_t mask) const { return rel_err_[mask]; }
  int levels_used() const { return levels_; }

 private:
  std::size_t sites_;
  bool only_empty_;
  int levels_ = 0;
  std::vector<double> log_z_;
  std::vector<double> rel_err_;
};

/// Z by subset expansion; refuses boxes with more than 9 sites or d > 2.
ExactResult exact_z_subset_expansion(const Lattice& lat, const InteractionPotential& psi,
                                     double eps, const QuadratureSpec& quad);

/// Max over an epsilon grid on [0, eps_max] of
/// | |Lambda|^-1 log(Z(eps)/Z(0)) - int_0^eps rho(e)/e de |, d = 1.
double check_integral_identity(int side, const InteractionPotential& psi, double eps_max,
                               int grid_points, const QuadratureSpec& quad);

/// log Z(eps) - |Lambda| log eps (>= 0 since the all-pinned term is eps^|Lambda|).
double check_lower_bound_z(const Lattice& lat, const InteractionPotential& psi, double eps,
                           const QuadratureSpec& quad);

struct MonotoneCheck {
  bool monotone = true;
  std::vector<std::pair<double, double>> table;  // (eps, rho)
};

/// Exact rho(eps) on the d = 1 chain over `grid`, checked non-decreasing.
MonotoneCheck check_rho_monotone(int side, const InteractionPotential& psi,
                                 std::span<const double> grid, const QuadratureSpec& quad);

/// Per-site upper bound on |Lambda|^-1 log Z(0) from keeping one outside
/// bond and the bonds of the snake path only.
double snake_log_cap(const Lattice& lat, const InteractionPotential& psi);

}  // namespace wetting
