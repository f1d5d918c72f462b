#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "wetting/lattice.hpp"

namespace wetting {

enum class Convexity { Convex, Concave };

/// Even bond potential Psi with Psi(0) = 0.
class InteractionPotential {
 public:
  enum class Kind { Sos, Gaussian, Custom };

  /// Psi(x) = |x|.
  static InteractionPotential sos();
  /// Psi(x) = x^2 / 2.
  static InteractionPotential gaussian();
  /// Extension hook for other even potentials. Only energy evaluation,
  /// Metropolis updates, the Chalker maps and the chain oracle accept it.
  static InteractionPotential custom(std::function<double(double)> psi, Convexity convexity,
                                     std::string name);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  Convexity convexity() const { return convexity_; }

  double operator()(double x) const {
    switch (kind_) {
      case Kind::Sos:
        return x < 0 ? -x : x;
      case Kind::Gaussian:
        return 0.5 * x * x;
      case Kind::Custom:
        break;
    }
    return custom_(x);
  }

 private:
  InteractionPotential(Kind kind, std::string name, Convexity convexity)
      : kind_(kind), name_(std::move(name)), convexity_(convexity) {}

  Kind kind_;
  std::string name_;
  Convexity convexity_;
  std::function<double(double)> custom_;
};

struct NoPinning {};

/// Square well of width a and depth b: weight e^b on {phi <= a}.
struct SquareWell {
  double a;
  double b;
  double epsilon() const;
};

/// Point mass of weight epsilon at height 0 on every site.
struct DeltaPinning {
  double epsilon;
};

using PinningSpec = std::variant<NoPinning, SquareWell, DeltaPinning>;

/// a * e^b; throws ParameterError unless a > 0 and b > 0.
double epsilon_of(double a, double b);

/// Throws ParameterError for a > 0 / b > 0 / epsilon >= 0 violations.
void validate(const PinningSpec& pin);

std::string pinning_name(const PinningSpec& pin);

/// Heights on the box plus the mask of sites sitting on the delta atom.
struct FieldConfig {
  FieldConfig() = default;
  explicit FieldConfig(std::size_t n, double height = 0.0) : heights(n, height), pinned(n, 0) {}

  std::size_t size() const { return heights.size(); }

  std::vector<double> heights;
  std::vector<std::uint8_t> pinned;
};

/// Throws InvariantError on a negative height, a pinned site off zero, or a
/// pinned site under a pinning other than DeltaPinning.
void check_invariants(const FieldConfig& cfg, const PinningSpec& pin);

/// Sum of Psi over internal bonds (each once) plus Psi(phi_x) per outside bond.
double energy_total(const Lattice& lat, std::span<const double> heights,
                    const InteractionPotential& psi);
double energy_total(const Lattice& lat, const FieldConfig& cfg, const InteractionPotential& psi);

/// energy_total after setting `site` to `new_height`, minus energy_total before.
double energy_delta(const Lattice& lat, const FieldConfig& cfg, Site site, double new_height,
                    const InteractionPotential& psi);

/// b * #{x : phi_x <= a}, i.e. minus the square-well potential.
double well_log_weight(const FieldConfig& cfg, const PinningSpec& pin);

/// One piece of a single-site conditional density on [lo, hi).
///
/// Piecewise exponential: log density = log_weight + slope * (t - lo).
/// Truncated Gaussian:    log density = log_weight - (t - mean)^2 / (2 variance).
/// log_mass is the log of the integral of that density over the piece.
struct LawSegment {
  double lo = 0.0;
  double hi = 0.0;
  double log_weight = 0.0;
  double slope = 0.0;
  double log_mass = -std::numeric_limits<double>::infinity();
};

/// Exact single-site conditional of the Gibbs measure on [0, inf), up to a
/// common constant: continuous segments plus an optional atom at 0.
class ConditionalLaw {
 public:
  enum class Shape { PiecewiseExponential, TruncatedGaussian };
  static constexpr std::size_t kMaxSegments = 2 * Lattice::kMaxDim + 2;

  Shape shape = Shape::PiecewiseExponential;
  double mean = 0.0;      // Gaussian only
  double variance = 0.0;  // Gaussian only
  double log_atom = -std::numeric_limits<double>::infinity();
  double log_continuous_mass = -std::numeric_limits<double>::infinity();

  std::span<const LawSegment> segments() const { return {segments_.data(), count_}; }
  void add_segment(const LawSegment& s);
  void clear() { count_ = 0; }

  /// Probability of the atom: atom / (atom + continuous mass).
  double atom_probability() const;
  /// Unnormalized log density of the continuous part at t >= 0.
  double log_density(double t) const;

 private:
  std::array<LawSegment, kMaxSegments> segments_{};
  std::size_t count_ = 0;
};

/// Builds the conditional law of `site` given all other heights. Outside
/// neighbours contribute height 0. Requires an SOS or Gaussian potential.
ConditionalLaw site_conditional(const Lattice& lat, const FieldConfig& cfg, Site site,
                                const InteractionPotential& psi, const PinningSpec& pin);

/// Same, from an explicit list of the 2d neighbour heights.
void conditional_from_neighbors(std::span<const double> neighbor_heights,
                                const InteractionPotential& psi, const PinningSpec& pin,
                                ConditionalLaw& law);

}  // namespace wetting
