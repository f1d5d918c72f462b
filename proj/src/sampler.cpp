#include "wetting/sampler.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "wetting/error.hpp"
#include "wetting/normal.hpp"

namespace wetting {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Upper tails beyond this are sampled by rejection; 1 - Phi underflows near 38.
constexpr double kRejectionTail = 37.0;
constexpr std::uint32_t kInitSweep = 0;

std::size_t pick_segment(std::span<const LawSegment> segs, double u) {
  double top = -kInf;
  for (const auto& s : segs) top = std::max(top, s.log_mass);
  if (!(top > -kInf)) throw InternalError("all conditional segments have zero mass");
  std::array<double, ConditionalLaw::kMaxSegments> w{};
  double total = 0.0;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    w[i] = std::exp(segs[i].log_mass - top);
    total += w[i];
  }
  double target = u * total;
  std::size_t last = 0;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    if (w[i] <= 0.0) continue;
    last = i;
    if (target < w[i]) return i;
    target -= w[i];
  }
  return last;
}

// Upper-tail sampler for [lo, hi] with lo >= 0.
double sample_upper(double lo, double hi, CounterRng& rng) {
  if (lo < kRejectionTail) {
    const double qlo = std::exp(normal::log_upper_tail(lo));
    const double qhi = std::exp(normal::log_upper_tail(hi));
    const double q = qhi + rng.uniform() * (qlo - qhi);
    return std::clamp(normal::upper_quantile(q), lo, hi);
  }
  // Robert (1995): translated exponential proposal with optimal rate.
  const double rate = 0.5 * (lo + std::sqrt(lo * lo + 4.0));
  const double span_mass = hi == kInf ? 1.0 : -std::expm1(-rate * (hi - lo));
  for (;;) {
    const double z = lo - std::log1p(-rng.uniform() * span_mass) / rate;
    const double d = z - rate;
    if (rng.uniform() <= std::exp(-0.5 * d * d)) return std::min(z, hi);
  }
}

std::string dump_state(const FieldConfig& cfg, std::int64_t sweep) {
  std::ostringstream os;
  os << "state after sweep " << sweep << ": heights=[";
  const std::size_t shown = std::min<std::size_t>(cfg.size(), 64);
  for (std::size_t i = 0; i < shown; ++i) {
    os << (i ? "," : "") << cfg.heights[i] << (cfg.pinned[i] ? "*" : "");
  }
  if (shown < cfg.size()) os << ",...(" << cfg.size() - shown << " more)";
  os << "]";
  return os.str();
}

}  // namespace

void validate(const ChainParams& p) {
  Lattice(p.dim, p.side);
  validate(p.pin);
  if (p.burn_in < 0) throw ParameterError("burn-in must be >= 0");
  if (p.sweeps < p.burn_in) throw ParameterError("sweeps must be >= burn-in");
  if (p.thinning < 1) throw ParameterError("thinning must be >= 1");
  if (p.sweeps >= (std::int64_t{1} << 32) - 1) throw ParameterError("too many sweeps");
  if (p.threads < 1) throw ParameterError("threads must be >= 1");
  if (p.kernel == Kernel::Metropolis) {
    if (std::holds_alternative<DeltaPinning>(p.pin)) {
      throw UsageError(
          "Metropolis cannot be used with delta pinning: its proposals never reach or leave the "
          "atom at height 0");
    }
    if (!(p.step_width > 0.0)) throw ParameterError("Metropolis step width must be > 0");
  } else if (p.psi.kind() == InteractionPotential::Kind::Custom) {
    throw UsageError("heat bath needs an exact conditional law (SOS or Gaussian potential)");
  }
  if (p.init == Initialization::Flat && !(p.init_height >= 0.0)) {
    throw ParameterError("flat initial height must be >= 0");
  }
  const std::size_t volume = Lattice(p.dim, p.side).size();
  for (Site s : p.clamped) {
    if (s >= volume) throw ParameterError("clamped site outside the box");
  }
}

double sample_piecewise_exponential(const ConditionalLaw& law, CounterRng& rng) {
  const auto segs = law.segments();
  const auto& s = segs[pick_segment(segs, rng.uniform())];
  const double width = s.hi - s.lo;
  const double u = rng.uniform();
  double offset;
  if (s.slope == 0.0) {
    offset = u * width;
  } else if (s.slope < 0.0) {
    offset = std::log1p(u * std::expm1(s.slope * width)) / s.slope;
  } else {
    // Mirror so the inversion always runs on a decaying exponential.
    offset = width + std::log1p(u * std::expm1(-s.slope * width)) / s.slope;
  }
  return std::clamp(s.lo + offset, s.lo, s.hi);
}

double sample_normal_interval(double lo, double hi, CounterRng& rng) {
  if (!(lo < hi)) throw InternalError("empty normal interval");
  if (lo >= 0.0) return sample_upper(lo, hi, rng);
  if (hi <= 0.0) return -sample_upper(-hi, -lo, rng);
  const double below = std::exp(normal::log_upper_tail(-lo));  // Phi(lo)
  const double above = std::exp(normal::log_upper_tail(hi));   // 1 - Phi(hi)
  const double mass = 1.0 - below - above;
  const double u = rng.uniform();
  const double p = below + u * mass;
  const double z = p < 0.5 ? normal::quantile(p) : normal::upper_quantile(above + (1.0 - u) * mass);
  return std::clamp(z, lo, hi);
}

double sample_truncated_gaussian(double mean, double variance,
                                 std::span<const LawSegment> segments, CounterRng& rng) {
  if (!(variance > 0.0)) throw ParameterError("Gaussian variance must be > 0");
  const auto& s = segments[pick_segment(segments, rng.uniform())];
  const double sigma = std::sqrt(variance);
  const double z = sample_normal_interval((s.lo - mean) / sigma, (s.hi - mean) / sigma, rng);
  return std::clamp(mean + sigma * z, s.lo, s.hi);
}

double sample_continuous(const ConditionalLaw& law, CounterRng& rng) {
  if (law.shape == ConditionalLaw::Shape::PiecewiseExponential) {
    return sample_piecewise_exponential(law, rng);
  }
  return sample_truncated_gaussian(law.mean, law.variance, law.segments(), rng);
}

void heat_bath_site(const Lattice& lat, FieldConfig& cfg, Site site,
                    const InteractionPotential& psi, const PinningSpec& pin, CounterRng& rng) {
  const ConditionalLaw law = site_conditional(lat, cfg, site, psi, pin);
  if (law.log_atom > -kInf && rng.uniform() < law.atom_probability()) {
    cfg.heights[site] = 0.0;
    cfg.pinned[site] = 1;
    return;
  }
  cfg.heights[site] = sample_continuous(law, rng);
  cfg.pinned[site] = 0;
}

bool metropolis_site(const Lattice& lat, FieldConfig& cfg, Site site,
                     const InteractionPotential& psi, const PinningSpec& pin, double step_width,
                     CounterRng& rng) {
  if (std::holds_alternative<DeltaPinning>(pin)) {
    throw UsageError("Metropolis updates are not defined under delta pinning");
  }
  const double old = cfg.heights[site];
  const double proposal = std::abs(old + (2.0 * rng.uniform() - 1.0) * step_width);
  double log_ratio = -energy_delta(lat, cfg, site, proposal, psi);
  if (const auto* well = std::get_if<SquareWell>(&pin)) {
    log_ratio += well->b * (static_cast<double>(proposal <= well->a) - static_cast<double>(old <= well->a));
  }
  if (log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio) {
    cfg.heights[site] = proposal;
    return true;
  }
  return false;
}

Trace run_chain(const ChainParams& p) {
  validate(p);
  const Lattice lat(p.dim, p.side);
  const std::size_t volume = lat.size();

  std::vector<std::uint8_t> frozen(volume, 0);
  for (Site s : p.clamped) frozen[s] = 1;

  Trace trace;
  FieldConfig cfg(volume);
  for (Site x = 0; x < volume; ++x) {
    if (frozen[x]) continue;
    if (p.init == Initialization::Flat) {
      cfg.heights[x] = p.init_height;
    } else {
      CounterRng rng(p.seed, x, kInitSweep, p.chain);
      cfg.heights[x] = -std::log(rng.uniform());
    }
  }

  std::array<std::vector<Site>, 2> by_color;
  std::vector<Site> active;
  for (Site x = 0; x < volume; ++x) {
    if (frozen[x]) continue;
    active.push_back(x);
    by_color[static_cast<std::size_t>(lat.color(x))].push_back(x);
  }

  const bool metropolis = p.kernel == Kernel::Metropolis;
  auto update = [&](Site x, std::uint32_t sweep) -> bool {
    CounterRng rng(p.seed, x, sweep, p.chain);
    if (metropolis) return metropolis_site(lat, cfg, x, p.psi, p.pin, p.step_width, rng);
    heat_bath_site(lat, cfg, x, p.psi, p.pin, rng);
    return true;
  };

  const auto recorded = (p.sweeps - p.burn_in) / p.thinning;
  trace.snapshots.reserve(static_cast<std::size_t>(recorded));

  for (std::int64_t sweep = 1; sweep <= p.sweeps; ++sweep) {
    const auto tag = static_cast<std::uint32_t>(sweep);
    std::uint64_t accepted = 0;
    if (p.order == SweepOrder::Sequential) {
      for (Site x : active) accepted += update(x, tag) ? 1 : 0;
    } else {
      for (const auto& sites : by_color) {
        const auto count = static_cast<std::int64_t>(sites.size());
#if defined(_OPENMP)
#pragma omp parallel for num_threads(p.threads) schedule(static) reduction(+ : accepted) if (p.threads > 1)
#endif
        for (std::int64_t i = 0; i < count; ++i) {
          accepted += update(sites[static_cast<std::size_t>(i)], tag) ? 1 : 0;
        }
      }
    }
    trace.proposals += active.size();
    trace.accepted += accepted;

    try {
      check_invariants(cfg, p.pin);
    } catch (const InvariantError& e) {
      throw InvariantError(std::string(e.what()) + "; " + dump_state(cfg, sweep));
    }

    if (sweep > p.burn_in && (sweep - p.burn_in) % p.thinning == 0) {
      Snapshot snap = take_snapshot(lat, cfg, p.pin);
      if (p.extra_observable) snap.extra = p.extra_observable(cfg);
      trace.snapshots.push_back(snap);
    }
  }
  trace.final_config = std::move(cfg);
  return trace;
}

std::vector<Trace> run_chains(std::span<const ChainParams> params, int jobs) {
  std::vector<Trace> out(params.size());
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < params.size(); i = next++) {
      try {
        out[i] = run_chain(params[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1 || params.size() <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < std::min(workers, params.size()); ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace wetting
