#include "wetting/chalker.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "wetting/error.hpp"
#include "wetting/rng.hpp"
#include "wetting/sampler.hpp"

namespace wetting {

namespace {

std::vector<std::uint8_t> mask_at_most(const FieldConfig& cfg, double threshold) {
  std::vector<std::uint8_t> m(cfg.size());
  for (std::size_t x = 0; x < cfg.size(); ++x) m[x] = cfg.heights[x] <= threshold ? 1 : 0;
  return m;
}

std::size_t count(const std::vector<std::uint8_t>& m) {
  return static_cast<std::size_t>(std::count(m.begin(), m.end(), std::uint8_t{1}));
}

std::int64_t count_at_most(const FieldConfig& cfg, double threshold) {
  return std::count_if(cfg.heights.begin(), cfg.heights.end(),
                       [threshold](double h) { return h <= threshold; });
}

InequalityCheck make_check(double lhs, double rhs) {
  return {rhs - lhs, std::abs(lhs) + std::abs(rhs)};
}

}  // namespace

bool InequalityCheck::violated() const { return slack < -kSlackRoundoff * std::max(1.0, scale); }

StratifiedConfig stratify_square_well(const FieldConfig& cfg, double a) {
  StratifiedConfig s;
  s.in_b = mask_at_most(cfg, a);
  s.in_a = mask_at_most(cfg, 2.0 * a);
  s.b_size = count(s.in_b);
  s.a_size = count(s.in_a);
  return s;
}

StratifiedConfig stratify_delta(const FieldConfig& cfg) {
  StratifiedConfig s;
  s.in_b.assign(cfg.pinned.begin(), cfg.pinned.end());
  s.in_a = mask_at_most(cfg, 1.0);
  for (std::size_t x = 0; x < cfg.size(); ++x) s.in_a[x] |= s.in_b[x];
  s.b_size = count(s.in_b);
  s.a_size = count(s.in_a);
  return s;
}

bool in_b_m(const FieldConfig& cfg, const PinningSpec& pin, std::int64_t m) {
  return pinned_count(cfg, pin) >= m;
}

bool in_c_m(const FieldConfig& cfg, double a, std::int64_t m) {
  return count_at_most(cfg, 2.0 * a) >= m;
}

bool in_d_m(const FieldConfig& cfg, std::int64_t m) { return count_at_most(cfg, 1.0) >= m; }

FieldConfig map_t(const FieldConfig& cfg, double a) {
  FieldConfig out = cfg;
  for (double& h : out.heights) {
    if (h > a) h -= a;
  }
  return out;
}

FieldConfig map_s(const FieldConfig& cfg) {
  FieldConfig out(cfg.size());
  for (std::size_t x = 0; x < cfg.size(); ++x) {
    const double h = cfg.heights[x];
    out.heights[x] = h > 1.0 ? h - 1.0 : 0.0;
    out.pinned[x] = out.heights[x] == 0.0 ? 1 : 0;
  }
  return out;
}

InequalityCheck check_t_inequality(const Lattice& lat, const FieldConfig& cfg, double a) {
  const auto sos = InteractionPotential::sos();
  const double lhs = energy_total(lat, cfg, sos);
  const auto b = static_cast<double>(count_at_most(cfg, a));
  const double rhs = energy_total(lat, map_t(cfg, a), sos) +
                     a * static_cast<double>(lat.outside_bond_total()) +
                     2.0 * lat.dim() * a * b;
  return make_check(lhs, rhs);
}

InequalityCheck check_s_inequality_sos(const Lattice& lat, const FieldConfig& cfg) {
  const auto sos = InteractionPotential::sos();
  const double lhs = energy_total(lat, cfg, sos);
  const auto a = static_cast<double>(count_at_most(cfg, 1.0));
  const double rhs = energy_total(lat, map_s(cfg), sos) +
                     static_cast<double>(lat.outside_bond_total()) + 2.0 * lat.dim() * a;
  return make_check(lhs, rhs);
}

InequalityCheck check_s_inequality_gauss(const Lattice& lat, const FieldConfig& cfg) {
  if (lat.dim() != 2) throw UsageError("the Gaussian S inequality is stated for d = 2 only");
  const auto gauss = InteractionPotential::gaussian();
  const double lhs = energy_total(lat, cfg, gauss);
  const auto in_a = mask_at_most(cfg, 1.0);
  const FieldConfig shifted = map_s(cfg);
  const double rhs = energy_total(lat, shifted, gauss) +
                     2.0 * static_cast<double>(boundary_sites(lat).size()) +
                     8.0 * static_cast<double>(count(in_a)) + boundary_sum_x(lat, shifted, in_a);
  return make_check(lhs, rhs);
}

double boundary_sum_x(const Lattice& lat, const FieldConfig& cfg,
                      const std::vector<std::uint8_t>& in_a) {
  // Each bond from W to a box site y outside W contributes phi_y once:
  // bonds to A inside the box plus bonds to the exterior.
  double sum = 0.0;
  for (Site y = 0; y < lat.size(); ++y) {
    if (in_a[y]) continue;
    int w_neighbors = lat.outside_bonds(y);
    for (Site x : lat.neighbors(y)) w_neighbors += in_a[x] ? 1 : 0;
    sum += w_neighbors * cfg.heights[y];
  }
  return 2.0 * sum;
}

std::size_t boundary_size_w(const Lattice& lat, const std::vector<std::uint8_t>& in_a) {
  // Exterior shell sites adjacent to the box touch exactly one box site, so
  // they correspond one-to-one with outside bonds.
  std::size_t size = 0;
  for (Site x = 0; x < lat.size(); ++x) {
    if (in_a[x]) {
      for (Site y : lat.neighbors(x)) {
        if (!in_a[y]) {
          ++size;
          break;
        }
      }
    } else {
      size += static_cast<std::size_t>(lat.outside_bonds(x));
    }
  }
  return size;
}

Estimate check_boundary_moment(const Lattice& lat, const std::vector<Site>& clamped,
                               const MomentBudget& budget) {
  if (lat.dim() != 2) throw UsageError("boundary moment check is defined for d = 2");
  std::vector<std::uint8_t> in_a(lat.size(), 0);
  for (Site s : clamped) {
    if (s >= lat.size()) throw ParameterError("clamped site outside the box");
    in_a[s] = 1;
  }
  const std::size_t dw = boundary_size_w(lat, in_a);
  if (count(in_a) == lat.size() || dw == 0) {
    Estimate zero;
    zero.standard_error = 0.0;
    zero.batches = kDefaultBatches;
    return zero;
  }
  ChainParams p;
  p.dim = 2;
  p.side = lat.side();
  p.psi = InteractionPotential::gaussian();
  p.pin = NoPinning{};
  p.sweeps = budget.sweeps;
  p.burn_in = budget.burn_in;
  p.seed = budget.seed;
  p.clamped = clamped;
  p.extra_observable = [&lat, in_a, dw](const FieldConfig& cfg) {
    return boundary_sum_x(lat, cfg, in_a) / static_cast<double>(dw);
  };
  return estimate_extra(run_chain(p));
}

std::vector<VerifyRow> verify_chalker(const VerifyOptions& options) {
  constexpr double kNudge = 1e-12;
  constexpr std::array<double, 3> kWellWidths{0.05, 0.1, 0.3};

  struct Shape {
    int dim;
    int side;
  };
  std::vector<Shape> t_shapes, s_shapes, g_shapes;
  for (int d = 1; d <= 2; ++d)
    for (int n = 2; n <= 6; ++n) t_shapes.push_back({d, n});
  for (int d = 1; d <= 3; ++d)
    for (int n = 1; n <= 5; ++n) s_shapes.push_back({d, n});
  for (int n = 1; n <= 6; ++n) g_shapes.push_back({2, n});

  // Random heights: a mixture of scales so that every stratum gets populated.
  auto random_config = [](std::size_t n, CounterRng& rng) {
    FieldConfig cfg(n);
    const int kind = static_cast<int>(rng.uniform() * 4.0);
    const double scale = std::array<double, 5>{0.1, 0.5, 1.5, 4.0, 12.0}[static_cast<std::size_t>(rng.uniform() * 5.0)];
    for (auto& h : cfg.heights) {
      switch (kind) {
        case 0:
          h = scale * rng.uniform();
          break;
        case 1:
          h = -scale * std::log(rng.uniform());
          break;
        case 2:
          h = rng.uniform() < 0.5 ? 0.0 : scale * rng.uniform();
          break;
        default:
          h = std::abs(scale + scale * (rng.uniform() - 0.5));
          break;
      }
    }
    return cfg;
  };
  // Heights at and within 1e-12 of the thresholds a, 2a, 1.
  auto adversarial_config = [](std::size_t n, double a, CounterRng& rng) {
    FieldConfig cfg(n);
    const std::array<double, 13> pts{0.0,          a,   2.0 * a,     1.0,         a - kNudge,
                                     a + kNudge,   2.0 * a - kNudge, 2.0 * a + kNudge,
                                     1.0 - kNudge, 1.0 + kNudge,     2.0,         3.0 * a,
                                     2.0 + kNudge};
    for (auto& h : cfg.heights) {
      const double u = rng.uniform();
      h = u < 0.9 ? pts[static_cast<std::size_t>(rng.uniform() * pts.size())] : 5.0 * rng.uniform();
    }
    return cfg;
  };

  VerifyRow t_row{"t_inequality_sos", 0, 1e300, 0};
  VerifyRow s_row{"s_inequality_sos", 0, 1e300, 0};
  VerifyRow g_row{"s_inequality_gauss_d2", 0, 1e300, 0};
  VerifyRow tmap_row{"t_map_count", 0, 1e300, 0};
  VerifyRow smap_row{"s_map_count", 0, 1e300, 0};

  auto record = [](VerifyRow& row, const InequalityCheck& c) {
    ++row.configs;
    row.min_slack = std::min(row.min_slack, c.slack);
    if (c.violated()) ++row.violations;
  };

  const std::int64_t total = options.random_configs + options.adversarial_configs;
  for (std::int64_t i = 0; i < total; ++i) {
    const bool adversarial = i >= options.random_configs;
    const auto idx = static_cast<std::uint32_t>(i);
    const double a = kWellWidths[static_cast<std::size_t>(i) % kWellWidths.size()];

    {
      const auto& sh = t_shapes[static_cast<std::size_t>(i) % t_shapes.size()];
      const Lattice lat(sh.dim, sh.side);
      CounterRng rng(options.seed, idx, 1, 0);
      const FieldConfig cfg = adversarial ? adversarial_config(lat.size(), a, rng) : random_config(lat.size(), rng);
      record(t_row, check_t_inequality(lat, cfg, a));
      const auto diff = count_at_most(map_t(cfg, a), a) - count_at_most(cfg, 2.0 * a);
      ++tmap_row.configs;
      tmap_row.min_slack = std::min(tmap_row.min_slack, static_cast<double>(diff));
      if (diff < 0) ++tmap_row.violations;
    }
    {
      const auto& sh = s_shapes[static_cast<std::size_t>(i) % s_shapes.size()];
      const Lattice lat(sh.dim, sh.side);
      CounterRng rng(options.seed, idx, 2, 0);
      const FieldConfig cfg = adversarial ? adversarial_config(lat.size(), a, rng) : random_config(lat.size(), rng);
      record(s_row, check_s_inequality_sos(lat, cfg));
      const FieldConfig shifted = map_s(cfg);
      const auto zeros = std::count(shifted.heights.begin(), shifted.heights.end(), 0.0);
      const auto diff = zeros - count_at_most(cfg, 1.0);
      ++smap_row.configs;
      smap_row.min_slack = std::min(smap_row.min_slack, -std::abs(static_cast<double>(diff)));
      if (diff != 0) ++smap_row.violations;
    }
    {
      const auto& sh = g_shapes[static_cast<std::size_t>(i) % g_shapes.size()];
      const Lattice lat(sh.dim, sh.side);
      CounterRng rng(options.seed, idx, 3, 0);
      const FieldConfig cfg = adversarial ? adversarial_config(lat.size(), a, rng) : random_config(lat.size(), rng);
      record(g_row, check_s_inequality_gauss(lat, cfg));
    }
  }
  return {t_row, s_row, g_row, tmap_row, smap_row};
}

}  // namespace wetting
