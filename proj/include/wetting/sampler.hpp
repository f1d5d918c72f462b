#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "wetting/lattice.hpp"
#include "wetting/model.hpp"
#include "wetting/observables.hpp"
#include "wetting/rng.hpp"

namespace wetting {

enum class Kernel { HeatBath, Metropolis };
enum class SweepOrder { Sequential, Checkerboard };
enum class Initialization { Exponential, Flat };

struct ChainParams {
  int dim = 1;
  int side = 1;
  InteractionPotential psi = InteractionPotential::sos();
  PinningSpec pin = NoPinning{};
  Kernel kernel = Kernel::HeatBath;
  SweepOrder order = SweepOrder::Sequential;
  std::int64_t sweeps = 0;
  std::int64_t burn_in = 0;
  std::int64_t thinning = 1;
  std::uint64_t seed = 0;
  /// Stream index; replicas of one parameter point differ only here.
  std::uint32_t chain = 0;
  double step_width = 1.0;
  Initialization init = Initialization::Exponential;
  double init_height = 1.0;
  /// Sites held at height 0 for the whole run (not counted as pinned).
  std::vector<Site> clamped;
  /// Recorded into Snapshot::extra when set.
  std::function<double(const FieldConfig&)> extra_observable;
  /// Worker threads for checkerboard sweeps; 1 runs serially.
  int threads = 1;
};

/// Throws ParameterError / UsageError for inconsistent parameters.
void validate(const ChainParams& params);

struct Trace {
  std::vector<Snapshot> snapshots;
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;
  FieldConfig final_config;

  double acceptance_rate() const {
    return proposals == 0 ? 1.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
  }
};

/// Draws from the continuous part of a piecewise-exponential law by segment
/// selection and closed-form inversion within the segment.
double sample_piecewise_exponential(const ConditionalLaw& law, CounterRng& rng);

/// Standard normal restricted to [lo, hi]; inverts the tail that keeps
/// precision and falls back to exponential rejection far out.
double sample_normal_interval(double lo, double hi, CounterRng& rng);

/// Draws from a Gaussian with the given mean and variance restricted to the
/// union of `segments`, each carrying its own log mass.
double sample_truncated_gaussian(double mean, double variance,
                                 std::span<const LawSegment> segments, CounterRng& rng);

/// Continuous part of any exact conditional law.
double sample_continuous(const ConditionalLaw& law, CounterRng& rng);

/// Redraws `site` from its exact conditional (atom included).
void heat_bath_site(const Lattice& lat, FieldConfig& cfg, Site site,
                    const InteractionPotential& psi, const PinningSpec& pin, CounterRng& rng);

/// Reflected uniform proposal |t + U(-w, w)|, Metropolis acceptance.
/// Returns whether the move was accepted. Not defined under delta pinning.
bool metropolis_site(const Lattice& lat, FieldConfig& cfg, Site site,
                     const InteractionPotential& psi, const PinningSpec& pin, double step_width,
                     CounterRng& rng);

/// Runs one chain; deterministic in (params) regardless of thread count.
Trace run_chain(const ChainParams& params);

/// Runs independent chains on up to `jobs` threads; results keep input order.
std::vector<Trace> run_chains(std::span<const ChainParams> params, int jobs);

}  // namespace wetting
