#include "wetting/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "wetting/error.hpp"
#include "wetting/normal.hpp"

namespace wetting {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// log of the integral of exp(slope * s) over s in [0, width].
double log_exp_integral(double slope, double width) {
  if (slope == 0.0) return std::log(width);
  if (slope < 0.0) {
    if (width == kInf) return -std::log(-slope);
    return std::log(-std::expm1(slope * width)) - std::log(-slope);
  }
  return slope * width + normal::log1mexp(-slope * width) - std::log(slope);
}

}  // namespace

InteractionPotential InteractionPotential::sos() { return {Kind::Sos, "sos", Convexity::Concave}; }

InteractionPotential InteractionPotential::gaussian() {
  return {Kind::Gaussian, "gaussian", Convexity::Convex};
}

InteractionPotential InteractionPotential::custom(std::function<double(double)> psi,
                                                  Convexity convexity, std::string name) {
  if (!psi) throw ParameterError("custom potential needs a callable");
  if (psi(0.0) != 0.0) throw ParameterError("custom potential must vanish at 0");
  for (double x : {0.125, 0.5, 1.0, 2.5, 7.0}) {
    const double v = psi(x);
    if (v < 0.0 || std::abs(v - psi(-x)) > 1e-12 * (1.0 + std::abs(v))) {
      throw ParameterError("custom potential must be even and non-negative");
    }
  }
  InteractionPotential p(Kind::Custom, std::move(name), convexity);
  p.custom_ = std::move(psi);
  return p;
}

double SquareWell::epsilon() const { return a * std::exp(b); }

double epsilon_of(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw ParameterError("square well needs a > 0 and b > 0");
  }
  return a * std::exp(b);
}

void validate(const PinningSpec& pin) {
  std::visit(Overloaded{
                 [](const NoPinning&) {},
                 [](const SquareWell& w) {
                   if (!(w.a > 0.0) || !(w.b > 0.0) || !std::isfinite(w.a) || !std::isfinite(w.b)) {
                     throw ParameterError("square well needs finite a > 0 and b > 0");
                   }
                 },
                 [](const DeltaPinning& d) {
                   if (!(d.epsilon >= 0.0) || !std::isfinite(d.epsilon)) {
                     throw ParameterError("delta pinning needs a finite epsilon >= 0");
                   }
                 },
             },
             pin);
}

std::string pinning_name(const PinningSpec& pin) {
  return std::visit(Overloaded{
                        [](const NoPinning&) { return std::string("none"); },
                        [](const SquareWell&) { return std::string("square_well"); },
                        [](const DeltaPinning&) { return std::string("delta"); },
                    },
                    pin);
}

void check_invariants(const FieldConfig& cfg, const PinningSpec& pin) {
  if (cfg.pinned.size() != cfg.heights.size()) {
    throw InvariantError("pinned mask and heights differ in size");
  }
  const bool delta = std::holds_alternative<DeltaPinning>(pin);
  for (std::size_t x = 0; x < cfg.size(); ++x) {
    const double h = cfg.heights[x];
    if (!(h >= 0.0)) {
      std::ostringstream os;
      os << "hard wall violated at site " << x << ": height " << h;
      throw InvariantError(os.str());
    }
    if (cfg.pinned[x]) {
      if (!delta) throw InvariantError("pinned site " + std::to_string(x) + " without delta pinning");
      if (h != 0.0) throw InvariantError("pinned site " + std::to_string(x) + " off zero");
    }
  }
}

double energy_total(const Lattice& lat, std::span<const double> heights,
                    const InteractionPotential& psi) {
  double total = 0.0;
  for (Site x = 0; x < lat.size(); ++x) {
    const double hx = heights[x];
    if (hx < 0.0) throw InvariantError("negative height at site " + std::to_string(x));
    for (Site y : lat.neighbors(x)) {
      if (y > x) total += psi(hx - heights[y]);
    }
    if (const int out = lat.outside_bonds(x); out > 0) total += out * psi(hx);
  }
  return total;
}

double energy_total(const Lattice& lat, const FieldConfig& cfg, const InteractionPotential& psi) {
  return energy_total(lat, cfg.heights, psi);
}

double energy_delta(const Lattice& lat, const FieldConfig& cfg, Site site, double new_height,
                    const InteractionPotential& psi) {
  if (!(new_height >= 0.0)) throw ParameterError("proposed height must be >= 0");
  const double old = cfg.heights[site];
  double delta = 0.0;
  for (Site y : lat.neighbors(site)) {
    const double hy = cfg.heights[y];
    delta += psi(new_height - hy) - psi(old - hy);
  }
  const int out = lat.outside_bonds(site);
  if (out > 0) delta += out * (psi(new_height) - psi(old));
  return delta;
}

double well_log_weight(const FieldConfig& cfg, const PinningSpec& pin) {
  const auto* well = std::get_if<SquareWell>(&pin);
  if (well == nullptr) throw UsageError("well_log_weight requires square-well pinning");
  std::size_t inside = 0;
  for (double h : cfg.heights) inside += (h <= well->a) ? 1 : 0;
  return well->b * static_cast<double>(inside);
}

void ConditionalLaw::add_segment(const LawSegment& s) {
  if (count_ == kMaxSegments) throw InternalError("conditional law segment overflow");
  segments_[count_++] = s;
}

double ConditionalLaw::atom_probability() const {
  if (log_atom == -kInf) return 0.0;
  return 1.0 / (1.0 + std::exp(log_continuous_mass - log_atom));
}

double ConditionalLaw::log_density(double t) const {
  for (const auto& s : segments()) {
    if (t >= s.lo && t < s.hi) {
      if (shape == Shape::PiecewiseExponential) return s.log_weight + s.slope * (t - s.lo);
      return s.log_weight - (t - mean) * (t - mean) / (2.0 * variance);
    }
  }
  return -kInf;
}

void conditional_from_neighbors(std::span<const double> nb, const InteractionPotential& psi,
                                const PinningSpec& pin, ConditionalLaw& law) {
  law.clear();
  law.log_atom = -kInf;
  const auto* well = std::get_if<SquareWell>(&pin);
  const double well_top = well ? well->a : -1.0;
  const double well_depth = well ? well->b : 0.0;
  const auto k = static_cast<double>(nb.size());

  if (psi.kind() == InteractionPotential::Kind::Sos) {
    law.shape = ConditionalLaw::Shape::PiecewiseExponential;
    std::array<double, ConditionalLaw::kMaxSegments> cuts{};
    std::size_t ncuts = 0;
    for (double n : nb) {
      if (n > 0.0) cuts[ncuts++] = n;
    }
    if (well) cuts[ncuts++] = well_top;
    std::sort(cuts.begin(), cuts.begin() + ncuts);
    ncuts = static_cast<std::size_t>(std::unique(cuts.begin(), cuts.begin() + ncuts) - cuts.begin());

    double lo = 0.0;
    for (std::size_t i = 0; i <= ncuts; ++i) {
      const double hi = i < ncuts ? cuts[i] : kInf;
      LawSegment s;
      s.lo = lo;
      s.hi = hi;
      int above = 0;
      int below = 0;
      double log_w = 0.0;
      for (double n : nb) {
        above += (n >= hi) ? 1 : 0;
        below += (n <= lo) ? 1 : 0;
        log_w -= std::abs(lo - n);
      }
      if (well && hi <= well_top) log_w += well_depth;
      s.slope = static_cast<double>(above - below);
      s.log_weight = log_w;
      s.log_mass = log_w + log_exp_integral(s.slope, hi - lo);
      law.add_segment(s);
      lo = hi;
    }
    if (const auto* delta = std::get_if<DeltaPinning>(&pin); delta && delta->epsilon > 0.0) {
      double log_f0 = 0.0;
      for (double n : nb) log_f0 -= n;
      law.log_atom = std::log(delta->epsilon) + log_f0;
    }
  } else if (psi.kind() == InteractionPotential::Kind::Gaussian) {
    law.shape = ConditionalLaw::Shape::TruncatedGaussian;
    double sum = 0.0;
    for (double n : nb) sum += n;
    law.mean = sum / k;
    law.variance = 1.0 / k;
    const double sigma = std::sqrt(law.variance);
    const double log_scale = 0.5 * std::log(2.0 * std::numbers::pi * law.variance);
    auto push = [&](double lo, double hi, double log_w) {
      LawSegment s;
      s.lo = lo;
      s.hi = hi;
      s.log_weight = log_w;
      s.log_mass = log_w + log_scale +
                   normal::log_interval_mass((lo - law.mean) / sigma, (hi - law.mean) / sigma);
      law.add_segment(s);
    };
    if (well) {
      push(0.0, well_top, well_depth);
      push(well_top, kInf, 0.0);
    } else {
      push(0.0, kInf, 0.0);
    }
    if (const auto* delta = std::get_if<DeltaPinning>(&pin); delta && delta->epsilon > 0.0) {
      law.log_atom = std::log(delta->epsilon) - law.mean * law.mean / (2.0 * law.variance);
    }
  } else {
    throw UsageError("exact conditional laws exist only for the SOS and Gaussian potentials");
  }

  double total = -kInf;
  for (const auto& s : law.segments()) total = normal::log_add(total, s.log_mass);
  if (!(total > -kInf) || std::isnan(total)) {
    throw InternalError("conditional law has zero continuous mass");
  }
  law.log_continuous_mass = total;
}

ConditionalLaw site_conditional(const Lattice& lat, const FieldConfig& cfg, Site site,
                                const InteractionPotential& psi, const PinningSpec& pin) {
  std::array<double, 2 * Lattice::kMaxDim> nb{};
  std::size_t k = 0;
  for (Site y : lat.neighbors(site)) nb[k++] = cfg.heights[y];
  for (int i = 0; i < lat.outside_bonds(site); ++i) nb[k++] = 0.0;
  ConditionalLaw law;
  conditional_from_neighbors(std::span<const double>(nb.data(), k), psi, pin, law);
  return law;
}

}  // namespace wetting
