#include "wetting/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "wetting/error.hpp"
#include "wetting/normal.hpp"
#include "wetting/quadrature.hpp"

namespace wetting {

namespace {

constexpr int kPanelOrder = 16;
constexpr int kMaxChainSites = 64;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Panel {
  std::size_t first;
  double lo;
  double hi;
  double well_factor;
};

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Rescales v to unit max-norm and returns the log of the factor removed.
double normalize(std::vector<double>& v) {
  const double m = max_abs(v);
  if (!(m > 0.0) || !std::isfinite(m)) throw InternalError("transfer vector degenerated");
  for (double& x : v) x /= m;
  return std::log(m);
}

int chain_outside_bonds(int side, int k) {
  if (side == 1) return 2;
  return (k == 0 || k == side - 1) ? 1 : 0;
}

}  // namespace

QuadratureSpec QuadratureSpec::defaults_for(const InteractionPotential& psi, int side) {
  // Chain heights grow like sqrt(N); the cutoff follows.
  QuadratureSpec q;
  const double grow = static_cast<double>(std::max(side, 1) / 2);
  q.cutoff = psi.kind() == InteractionPotential::Kind::Gaussian ? 12.0 + grow
                                                                : std::max(40.0, 30.0 + grow);
  return q;
}

void validate(const QuadratureSpec& quad) {
  if (!(quad.cutoff >= 10.0)) throw ParameterError("quadrature cutoff must be >= 10");
  if (quad.nodes_per_unit < 4) throw ParameterError("need at least 4 nodes per unit height");
  if (!(quad.target_rel_error > 0.0)) throw ParameterError("target error must be > 0");
}

// ---------------------------------------------------------------------------
// Chain oracle

struct ChainTransfer::Sweep {
  std::vector<std::vector<double>> forward;   // F_k over targets 0..n (n is t = 0)
  std::vector<double> forward_log;
  std::vector<std::vector<double>> backward;  // beta_k over sources 0..n-1
  std::vector<double> backward_atom;          // beta_k[atom] / eps
  std::vector<double> backward_log;
  double log_z = 0.0;
};

ChainTransfer::ChainTransfer(int side, InteractionPotential psi, const PinningSpec& pin,
                             QuadratureSpec quad)
    : side_(side), psi_(std::move(psi)) {
  if (side < 1 || side > kMaxChainSites) {
    throw ParameterError("chain oracle supports 1 <= N <= 64");
  }
  if (!(quad.cutoff > 0.0) || quad.nodes_per_unit < 4) {
    throw ParameterError("invalid quadrature spec");
  }
  validate(pin);
  if (const auto* w = std::get_if<SquareWell>(&pin)) {
    has_well_ = true;
    well_ = *w;
  }

  std::vector<double> edges;
  const double width = static_cast<double>(kPanelOrder) / quad.nodes_per_unit;
  for (double t = 0.0; t < quad.cutoff - 1e-12; t += width) edges.push_back(t);
  edges.push_back(quad.cutoff);
  if (has_well_ && well_.a < quad.cutoff) edges.push_back(well_.a);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](double x, double y) { return std::abs(x - y) < 1e-12; }),
              edges.end());

  std::vector<Panel> panels;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double lo = edges[p];
    const double hi = edges[p + 1];
    const bool inside = has_well_ && hi <= well_.a + 1e-12;
    panels.push_back({nodes_.size(), lo, hi, inside ? std::exp(well_.b) : 1.0});
    const auto rule = quad::gauss_legendre(kPanelOrder, lo, hi);
    for (int q = 0; q < kPanelOrder; ++q) {
      nodes_.push_back(rule.nodes[static_cast<std::size_t>(q)]);
      measure_.push_back(rule.weights[static_cast<std::size_t>(q)] * panels.back().well_factor);
      in_well_.push_back(inside ? 1 : 0);
    }
  }

  const std::size_t n = nodes_.size();
  auto kernel = [this](double x) { return std::exp(-psi_(x)); };
  const bool smooth = psi_.kind() == InteractionPotential::Kind::Gaussian;
  const auto unit = quad::gauss_legendre(kPanelOrder, 0.0, 1.0);

  matrix_.assign((n + 1) * n, 0.0);
  atom_col_.resize(n + 1);
  std::vector<double> basis(kPanelOrder);
  std::vector<std::vector<double>> bary(panels.size());
  for (std::size_t p = 0; p < panels.size(); ++p) {
    bary[p] = quad::barycentric_weights(
        std::span<const double>(nodes_.data() + panels[p].first, kPanelOrder));
  }
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = i < n ? nodes_[i] : 0.0;
    double* row = matrix_.data() + i * n;
    atom_col_[i] = kernel(t);
    for (std::size_t p = 0; p < panels.size(); ++p) {
      const auto& pan = panels[p];
      const std::span<const double> pnodes(nodes_.data() + pan.first, kPanelOrder);
      if (smooth || !(pan.lo < t && t < pan.hi)) {
        for (int q = 0; q < kPanelOrder; ++q) {
          const std::size_t j = pan.first + static_cast<std::size_t>(q);
          row[j] += measure_[j] * kernel(t - nodes_[j]);
        }
        continue;
      }
      // Kink of Psi at s = t: integrate each side separately, pulling the
      // integrand back onto the panel nodes by interpolation.
      for (auto [a, b] : {std::pair{pan.lo, t}, std::pair{t, pan.hi}}) {
        for (int q = 0; q < kPanelOrder; ++q) {
          const double s = a + (b - a) * unit.nodes[static_cast<std::size_t>(q)];
          const double c = (b - a) * unit.weights[static_cast<std::size_t>(q)] * pan.well_factor *
                           kernel(t - s);
          quad::lagrange_basis(pnodes, bary[p], s, basis);
          for (int r = 0; r < kPanelOrder; ++r) {
            row[pan.first + static_cast<std::size_t>(r)] += c * basis[static_cast<std::size_t>(r)];
          }
        }
      }
    }
  }

  site_factor_.resize(static_cast<std::size_t>(side));
  for (int k = 0; k < side; ++k) {
    const int out = chain_outside_bonds(side, k);
    auto& g = site_factor_[static_cast<std::size_t>(k)];
    g.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      const double t = i < n ? nodes_[i] : 0.0;
      g[i] = std::exp(-out * psi_(t));
    }
  }
}

ChainTransfer::Sweep ChainTransfer::run(double eps, bool backward) const {
  const std::size_t n = nodes_.size();
  const auto sites = static_cast<std::size_t>(side_);
  Sweep s;
  s.forward.resize(sites);
  s.forward_log.resize(sites);
  s.forward[0] = site_factor_[0];
  s.forward_log[0] = normalize(s.forward[0]);
  for (std::size_t k = 1; k < sites; ++k) {
    const auto& prev = s.forward[k - 1];
    const auto& g = site_factor_[k];
    std::vector<double> next(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
      const double* row = matrix_.data() + i * n;
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += row[j] * prev[j];
      next[i] = g[i] * (acc + eps * atom_col_[i] * prev[n]);
    }
    s.forward_log[k] = s.forward_log[k - 1] + normalize(next);
    s.forward[k] = std::move(next);
  }
  const auto& last = s.forward[sites - 1];
  double z = eps * last[n];
  for (std::size_t j = 0; j < n; ++j) z += measure_[j] * last[j];
  if (!(z > 0.0)) throw InternalError("chain partition function is not positive");
  s.log_z = std::log(z) + s.forward_log[sites - 1];
  if (!backward) return s;

  s.backward.resize(sites);
  s.backward_atom.resize(sites);
  s.backward_log.resize(sites);
  s.backward[sites - 1] = measure_;
  s.backward_atom[sites - 1] = 1.0;
  s.backward_log[sites - 1] = 0.0;
  for (std::size_t k = sites - 1; k-- > 0;) {
    const auto& next = s.backward[k + 1];
    const double next_atom = eps * s.backward_atom[k + 1];
    const auto& g = site_factor_[k + 1];
    std::vector<double> cur(n, 0.0);
    double atom = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      const double v = (i < n ? next[i] : next_atom) * g[i];
      if (v == 0.0) continue;
      const double* row = matrix_.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) cur[j] += v * row[j];
      atom += v * atom_col_[i];
    }
    double scale = std::max(max_abs(cur), std::abs(atom));
    if (!(scale > 0.0)) throw InternalError("backward transfer degenerated");
    for (double& x : cur) x /= scale;
    s.backward_atom[k] = atom / scale;
    s.backward_log[k] = s.backward_log[k + 1] + std::log(scale);
    s.backward[k] = std::move(cur);
  }
  return s;
}

double ChainTransfer::log_z(double eps) const { return run(eps, false).log_z; }

double ChainTransfer::rho_over_epsilon(double eps) const {
  if (has_well_) throw UsageError("rho/eps needs a transfer built for delta pinning");
  const Sweep s = run(eps, true);
  const std::size_t n = nodes_.size();
  double sum = 0.0;
  for (std::size_t k = 0; k < s.forward.size(); ++k) {
    sum += s.backward_atom[k] * s.forward[k][n] *
           std::exp(s.forward_log[k] + s.backward_log[k] - s.log_z);
  }
  return sum / side_;
}

ExactResult ChainTransfer::evaluate(const PinningSpec& pin) const {
  validate(pin);
  double eps = 0.0;
  if (const auto* w = std::get_if<SquareWell>(&pin)) {
    if (!has_well_ || w->a != well_.a || w->b != well_.b) {
      throw UsageError("square well differs from the one the transfer was built for");
    }
  } else {
    if (has_well_) throw UsageError("transfer was built for a square well");
    if (const auto* d = std::get_if<DeltaPinning>(&pin)) eps = d->epsilon;
  }
  const Sweep s = run(eps, true);
  const std::size_t n = nodes_.size();
  ExactResult r;
  r.log_z = s.log_z;
  r.z = std::exp(s.log_z);
  r.pin_marginals.resize(static_cast<std::size_t>(side_));
  r.mean_heights.resize(static_cast<std::size_t>(side_));
  const bool delta = std::holds_alternative<DeltaPinning>(pin);
  double pinned_total = 0.0;
  for (std::size_t k = 0; k < s.forward.size(); ++k) {
    const double scale = std::exp(s.forward_log[k] + s.backward_log[k] - s.log_z);
    const auto& f = s.forward[k];
    const auto& b = s.backward[k];
    double in_well = 0.0;
    double height = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double m = b[j] * f[j];
      height += m * nodes_[j];
      if (in_well_[j]) in_well += m;
    }
    double p = 0.0;
    if (delta) p = eps * s.backward_atom[k] * f[n] * scale;
    if (has_well_) p = in_well * scale;
    r.pin_marginals[k] = p;
    r.mean_heights[k] = height * scale;
    pinned_total += p;
  }
  r.rho = pinned_total / side_;
  return r;
}

ExactResult exact_z_chain(int side, const InteractionPotential& psi, const PinningSpec& pin,
                          const QuadratureSpec& quad) {
  validate(quad);
  const ChainTransfer fine(side, psi, pin, quad);
  ExactResult r = fine.evaluate(pin);
  QuadratureSpec coarse = quad;
  coarse.cutoff = 0.8 * quad.cutoff;
  coarse.nodes_per_unit = std::max(8, quad.nodes_per_unit * 3 / 4);
  const ExactResult c = ChainTransfer(side, psi, pin, coarse).evaluate(pin);
  r.error_estimate = std::max(std::abs(std::expm1(c.log_z - r.log_z)), std::abs(c.rho - r.rho));
  if (r.error_estimate > quad.target_rel_error) {
    throw QuadratureError("chain oracle error estimate " + std::to_string(r.error_estimate) +
                          " exceeds target; use a denser grid or a larger cutoff");
  }
  return r;
}

double rho_by_log_derivative(int side, const InteractionPotential& psi, double eps,
                             const QuadratureSpec& quad) {
  if (!(eps >= 0.0)) throw ParameterError("epsilon must be >= 0");
  if (eps == 0.0) return 0.0;
  const ChainTransfer tr(side, psi, NoPinning{}, quad);
  auto central = [&](double h) { return (tr.log_z(eps + h) - tr.log_z(eps - h)) / (2.0 * h); };
  const double h = 0.25 * eps;
  const double d1 = central(h);
  const double d2 = central(h / 2.0);
  const double d3 = central(h / 4.0);
  const double r1 = (4.0 * d2 - d1) / 3.0;
  const double r2 = (4.0 * d3 - d2) / 3.0;
  const double derivative = (16.0 * r2 - r1) / 15.0;
  return eps * derivative / side;
}

// ---------------------------------------------------------------------------
// Subset expansion

namespace {

struct Grid {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Trapezoid grid with spacing h on [0, T/8], doubling on each of
// [T/8, T/4], [T/4, T/2], [T/2, T].
Grid graded_grid(double cutoff, int m) {
  Grid g;
  const double h = cutoff / 8.0 / m;
  const std::array<std::pair<double, int>, 4> segments{
      std::pair{cutoff / 8.0, m}, std::pair{cutoff / 4.0, m / 2}, std::pair{cutoff / 2.0, m / 2},
      std::pair{cutoff, m / 2}};
  g.nodes.push_back(0.0);
  g.weights.push_back(0.0);
  double step = h;
  for (const auto& [end, count] : segments) {
    const double start = g.nodes.back();
    for (int i = 1; i <= count; ++i) {
      g.weights.back() += 0.5 * step;
      g.nodes.push_back(i == count ? end : start + i * step);
      g.weights.push_back(0.5 * step);
    }
    step *= 2.0;
  }
  return g;
}

struct Level {
  Grid grid;
  std::vector<double> bond;                      // exp(-Psi(t_i - t_j)), n x n
  std::vector<std::vector<double>> site_factor;  // [outside bonds][i]
};

Level make_level(const InteractionPotential& psi, double cutoff, int m, int max_out) {
  Level lv;
  lv.grid = graded_grid(cutoff, m);
  const auto& t = lv.grid.nodes;
  const std::size_t n = t.size();
  lv.bond.resize(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) lv.bond[i * n + j] = std::exp(-psi(t[i] - t[j]));
  lv.site_factor.resize(static_cast<std::size_t>(max_out) + 1);
  for (int o = 0; o <= max_out; ++o) {
    auto& f = lv.site_factor[static_cast<std::size_t>(o)];
    f.resize(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = std::exp(-o * psi(t[i]));
  }
  return lv;
}

// Trapezoid sum of exp(-H) with the sites in `clamped` fixed at height 0.
// Node 0 of the grid is t = 0, so a clamped site keeps only that node.
double frontier_sum(const Lattice& lat, std::uint32_t clamped, const Level& lv) {
  static const std::vector<double> kOne{1.0};
  const std::size_t volume = lat.size();
  const int side = lat.side();
  const std::size_t width = lat.dim() == 1 ? 1 : static_cast<std::size_t>(side);
  const std::size_t n = lv.grid.nodes.size();

  auto fixed = [clamped](std::size_t k) { return ((clamped >> k) & 1u) != 0; };
  auto count = [&](std::size_t k) { return fixed(k) ? std::size_t{1} : n; };
  auto weights = [&](std::size_t k) -> const std::vector<double>& {
    return fixed(k) ? kOne : lv.grid.weights;
  };

  // Frontier slots hold the heights of sites k-width .. k-1, oldest slowest.
  std::vector<std::size_t> dims(width, 1);
  std::vector<double> tensor(1, 1.0);
  std::vector<double> next;
  for (std::size_t k = 0; k < volume; ++k) {
    const std::size_t n_old = dims[0];
    const std::size_t rest = tensor.size() / n_old;
    const std::size_t n_new = count(k);
    const bool real_oldest = k >= width;

    next.assign(rest * n_new, 0.0);
    for (std::size_t i = 0; i < n_old; ++i) {
      const double* brow = lv.bond.data() + i * n;
      const double c = real_oldest ? weights(k - width)[i] : 1.0;
      for (std::size_t r = 0; r < rest; ++r) {
        const double g = tensor[i * rest + r] * c;
        if (g == 0.0) continue;
        double* out = next.data() + r * n_new;
        if (!real_oldest) {
          for (std::size_t v = 0; v < n_new; ++v) out[v] += g;
        } else {
          for (std::size_t v = 0; v < n_new; ++v) out[v] += g * brow[v];
        }
      }
    }

    const auto& sf =
        lv.site_factor[static_cast<std::size_t>(lat.outside_bonds(static_cast<Site>(k)))];
    const bool left = lat.dim() == 2 && k % static_cast<std::size_t>(side) != 0;
    const std::size_t n_prev = dims[width - 1];
    for (std::size_t r = 0; r < rest; ++r) {
      double* out = next.data() + r * n_new;
      const double* lb = left ? lv.bond.data() + (r % n_prev) * n : nullptr;
      for (std::size_t v = 0; v < n_new; ++v) out[v] *= sf[v] * (left ? lb[v] : 1.0);
    }
    dims.erase(dims.begin());
    dims.push_back(n_new);
    tensor.swap(next);
  }

  // Integrate out the sites still on the frontier, last slot first.
  for (std::size_t s = width; s-- > 0;) {
    const auto& w = weights(volume - width + s);
    const std::size_t m = dims[s];
    std::vector<double> reduced(tensor.size() / m, 0.0);
    for (std::size_t r = 0; r < reduced.size(); ++r)
      for (std::size_t v = 0; v < m; ++v) reduced[r] += tensor[r * m + v] * w[v];
    tensor.swap(reduced);
  }
  return tensor[0];
}

// Multiply-adds allowed for one restricted partition function at the finest level.
constexpr double kWorkBudget = 3e8;
constexpr double kSingleWorkBudget = 1e9;
constexpr int kMaxLevels = 10;
constexpr int kMinLevels = 3;

}  // namespace

SubsetExpansion::SubsetExpansion(const Lattice& lat, const InteractionPotential& psi,
                                 const QuadratureSpec& quad, bool only_empty)
    : sites_(lat.size()), only_empty_(only_empty) {
  validate(quad);
  if (lat.dim() > 2 || lat.size() > kMaxSites) {
    throw QuadratureError("subset expansion handles d <= 2 boxes with at most 9 sites");
  }
  if (psi.kind() == InteractionPotential::Kind::Custom) {
    throw UsageError("subset expansion supports the SOS and Gaussian potentials");
  }
  constexpr int kBaseIntervals = 2;
  const double width = lat.dim() == 1 ? 1.0 : lat.side();
  const double budget = only_empty ? kSingleWorkBudget : kWorkBudget;
  auto work = [&](int level) {
    const double n = 2.5 * kBaseIntervals * std::ldexp(1.0, level) + 1.0;
    return static_cast<double>(sites_) * std::pow(n, width + 1.0);
  };
  int top = kMinLevels - 1;
  while (top + 1 < kMaxLevels && work(top + 1) <= budget) ++top;

  std::vector<Level> levels;
  auto level = [&](int l) -> const Level& {
    while (static_cast<int>(levels.size()) <= l) {
      levels.push_back(make_level(psi, quad.cutoff, kBaseIntervals << levels.size(),
                                  2 * lat.dim()));
    }
    return levels[static_cast<std::size_t>(l)];
  };

  const std::size_t subsets = only_empty ? 1 : (std::size_t{1} << sites_);
  log_z_.assign(std::size_t{1} << sites_, -kInf);
  rel_err_.assign(std::size_t{1} << sites_, 0.0);
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    // Romberg table over grid halvings. The accepted value is the entry of
    // the last row whose step from its left neighbour is smallest; coarse
    // rows are far from asymptotic on the graded grid.
    std::vector<std::vector<double>> table;
    double best = 0.0;
    double err = kInf;
    for (int l = 0; l <= top; ++l) {
      std::vector<double> row{frontier_sum(lat, static_cast<std::uint32_t>(mask), level(l))};
      for (std::size_t c = 1; c <= static_cast<std::size_t>(l); ++c) {
        const double factor = std::ldexp(1.0, 2 * static_cast<int>(c)) - 1.0;
        row.push_back(row[c - 1] + (row[c - 1] - table.back()[c - 1]) / factor);
      }
      best = row.back();
      err = kInf;
      for (std::size_t c = 1; c < row.size(); ++c) {
        const double step = std::abs(row[c] - row[c - 1]) / std::abs(row[c]);
        if (step < err) {
          err = step;
          best = row[c];
        }
      }
      table.push_back(std::move(row));
      levels_ = std::max(levels_, l + 1);
      if (l + 1 >= kMinLevels && err < 1e-2 * quad.target_rel_error) break;
    }
    if (!(best > 0.0)) {
      throw QuadratureError("extrapolated partition function is not positive; grid too coarse");
    }
    log_z_[mask] = std::log(best);
    rel_err_[mask] = err;
  }
}

ExactResult SubsetExpansion::evaluate(double eps) const {
  if (!(eps >= 0.0)) throw ParameterError("epsilon must be >= 0");
  if (only_empty_ && eps > 0.0) throw UsageError("expansion was built for epsilon = 0 only");
  const std::size_t subsets = eps > 0.0 ? (std::size_t{1} << sites_) : 1;
  const double log_eps = eps > 0.0 ? std::log(eps) : 0.0;

  double log_z = -kInf;
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    log_z = normal::log_add(log_z, std::popcount(mask) * log_eps + log_z_[mask]);
  }
  ExactResult r;
  r.log_z = log_z;
  r.z = std::exp(log_z);
  r.pin_marginals.assign(sites_, 0.0);
  double pinned = 0.0;
  double err = 0.0;
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    const double weight = std::exp(std::popcount(mask) * log_eps + log_z_[mask] - log_z);
    pinned += std::popcount(mask) * weight;
    err += weight * rel_err_[mask];
    for (std::size_t x = 0; x < sites_; ++x) {
      if ((mask >> x) & 1u) r.pin_marginals[x] += weight;
    }
  }
  r.rho = pinned / static_cast<double>(sites_);
  r.error_estimate = err;
  return r;
}

ExactResult exact_z_subset_expansion(const Lattice& lat, const InteractionPotential& psi,
                                     double eps, const QuadratureSpec& quad) {
  const SubsetExpansion expansion(lat, psi, quad, eps == 0.0);
  ExactResult r = expansion.evaluate(eps);
  if (r.error_estimate > quad.target_rel_error) {
    throw QuadratureError("subset expansion error estimate " + std::to_string(r.error_estimate) +
                          " exceeds target; use a denser grid or a looser target");
  }
  return r;
}

// ---------------------------------------------------------------------------
// Identities

double check_integral_identity(int side, const InteractionPotential& psi, double eps_max,
                               int grid_points, const QuadratureSpec& quad) {
  if (!(eps_max >= 0.0)) throw ParameterError("eps_max must be >= 0");
  const ChainTransfer tr(side, psi, NoPinning{}, quad);
  const double log_z0 = tr.log_z(0.0);
  double integral = 0.0;
  double worst = 0.0;
  double prev = 0.0;
  auto integrand = [&tr](double e) { return tr.rho_over_epsilon(e); };
  for (int i = 1; i < grid_points; ++i) {
    const double eps = eps_max * i / (grid_points - 1);
    integral += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, prev, eps,
                                                                              8, 1e-13);
    const double lhs = (tr.log_z(eps) - log_z0) / side;
    worst = std::max(worst, std::abs(lhs - integral));
    prev = eps;
  }
  return worst;
}

double check_lower_bound_z(const Lattice& lat, const InteractionPotential& psi, double eps,
                           const QuadratureSpec& quad) {
  if (!(eps >= 0.0)) throw ParameterError("epsilon must be >= 0");
  if (eps == 0.0) return kInf;
  double log_z;
  if (lat.size() <= SubsetExpansion::kMaxSites && lat.dim() <= 2) {
    log_z = SubsetExpansion(lat, psi, quad).evaluate(eps).log_z;
  } else if (lat.dim() == 1) {
    log_z = ChainTransfer(lat.side(), psi, NoPinning{}, quad).log_z(eps);
  } else {
    throw QuadratureError("no exact method for this box");
  }
  return log_z - static_cast<double>(lat.size()) * std::log(eps);
}

MonotoneCheck check_rho_monotone(int side, const InteractionPotential& psi,
                                 std::span<const double> grid, const QuadratureSpec& quad) {
  constexpr double kTolerance = 1e-12;
  const ChainTransfer tr(side, psi, NoPinning{}, quad);
  MonotoneCheck out;
  for (double eps : grid) {
    const double rho = tr.evaluate(DeltaPinning{eps}).rho;
    if (!out.table.empty() && rho < out.table.back().second - kTolerance) out.monotone = false;
    out.table.emplace_back(eps, rho);
  }
  return out;
}

double snake_log_cap(const Lattice& lat, const InteractionPotential& psi) {
  double half_line;
  double full_line;
  switch (psi.kind()) {
    case InteractionPotential::Kind::Sos:
      half_line = 1.0;
      full_line = 2.0;
      break;
    case InteractionPotential::Kind::Gaussian:
      half_line = std::sqrt(std::numbers::pi / 2.0);
      full_line = std::sqrt(2.0 * std::numbers::pi);
      break;
    default:
      throw UsageError("snake cap is tabulated for SOS and Gaussian potentials only");
  }
  const auto v = static_cast<double>(lat.size());
  return (std::log(half_line) + (v - 1.0) * std::log(full_line)) / v;
}

}  // namespace wetting
