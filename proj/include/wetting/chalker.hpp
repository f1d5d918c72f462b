#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wetting/lattice.hpp"
#include "wetting/model.hpp"
#include "wetting/observables.hpp"

namespace wetting {

// Height maps comparing nearly pinned configurations with pinned ones, and
// the pointwise energy inequalities they satisfy.

/// Site sets induced by a configuration. Square well: B = {phi <= a},
/// A = B plus {a < phi <= 2a}. Delta pinning: B = sites on the atom,
/// A = {phi <= 1}. W = A together with the exterior of the box.
struct StratifiedConfig {
  std::vector<std::uint8_t> in_b;
  std::vector<std::uint8_t> in_a;
  std::size_t b_size = 0;
  std::size_t a_size = 0;
};

StratifiedConfig stratify_square_well(const FieldConfig& cfg, double a);
StratifiedConfig stratify_delta(const FieldConfig& cfg);

/// phi in B_M: nu_N(phi) >= M.
bool in_b_m(const FieldConfig& cfg, const PinningSpec& pin, std::int64_t m);
/// phi in C_M: #{phi <= 2a} >= M.
bool in_c_m(const FieldConfig& cfg, double a, std::int64_t m);
/// phi in D_M: #{phi <= 1} >= M.
bool in_d_m(const FieldConfig& cfg, std::int64_t m);

/// Lowers every height above a by a; heights <= a are kept.
FieldConfig map_t(const FieldConfig& cfg, double a);
/// Lowers every height above 1 by 1 and sends the rest to 0 (marked pinned).
FieldConfig map_s(const FieldConfig& cfg);

/// Right-hand side minus left-hand side of an energy inequality.
struct InequalityCheck {
  double slack = 0.0;
  /// Magnitude of the terms involved; sets the round-off allowance.
  double scale = 0.0;
  /// Negative beyond floating-point round-off.
  bool violated() const;
};

/// Relative round-off allowance for slack comparisons.
inline constexpr double kSlackRoundoff = 1e-12;

/// SOS: H(phi) <= H(T phi) + a * (bonds leaving the box) + 2 d a |B|.
InequalityCheck check_t_inequality(const Lattice& lat, const FieldConfig& cfg, double a);

/// SOS: H(phi) <= H(S phi) + (bonds leaving the box) + 2 d |A|, A = {phi <= 1}.
InequalityCheck check_s_inequality_sos(const Lattice& lat, const FieldConfig& cfg);

/// Gaussian, d = 2: H(phi) <= H(S phi) + 2 |boundary| + 8 |A| + X(S phi),
/// with A = {phi <= 1} and W = A plus the exterior.
InequalityCheck check_s_inequality_gauss(const Lattice& lat, const FieldConfig& cfg);

/// X(phi) = 2 * sum over x in dW, y not in W, y ~ x of phi_y, where W is the
/// set `in_a` together with the exterior of the box.
double boundary_sum_x(const Lattice& lat, const FieldConfig& cfg,
                      const std::vector<std::uint8_t>& in_a);

/// |dW|: sites of W (exterior shell included) with a neighbour outside W.
std::size_t boundary_size_w(const Lattice& lat, const std::vector<std::uint8_t>& in_a);

struct MomentBudget {
  std::int64_t sweeps = 20000;
  std::int64_t burn_in = 5000;
  std::uint64_t seed = 1;
};

/// MCMC estimate of E[X / |dW|] under the hard-wall Gaussian field on the
/// box with the sites of `clamped` held at 0 and no pinning (d = 2).
Estimate check_boundary_moment(const Lattice& lat, const std::vector<Site>& clamped,
                               const MomentBudget& budget);

struct VerifyOptions {
  std::int64_t random_configs = 100000;
  std::int64_t adversarial_configs = 1000;
  std::uint64_t seed = 20240601;
};

struct VerifyRow {
  std::string name;
  std::int64_t configs = 0;
  double min_slack = 0.0;
  std::int64_t violations = 0;
};

/// Randomized and threshold-adversarial runs of the three inequalities and
/// the two counting properties of the maps. Map rows report the minimum of
/// #{T phi <= a} - #{phi <= 2a} and of #{S phi = 0} - #{phi <= 1} (negative,
/// resp. nonzero, counts as a violation).
std::vector<VerifyRow> verify_chalker(const VerifyOptions& options);

}  // namespace wetting
