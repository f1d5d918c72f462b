#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wetting/lattice.hpp"
#include "wetting/model.hpp"

namespace wetting {

/// Per-sweep measurement of a chain state.
struct Snapshot {
  std::int32_t pinned = 0;  // nu_N
  double mean_height = 0.0;
  double center_height = 0.0;
  double max_height = 0.0;
  /// Optional extra diagnostic (e.g. normalized boundary sum); NaN if unused.
  double extra = std::numeric_limits<double>::quiet_NaN();
};

/// nu_N: sites with phi <= a under a square well, sites on the atom under
/// delta pinning, and 0 without pinning.
std::int32_t pinned_count(const FieldConfig& cfg, const PinningSpec& pin);

Snapshot take_snapshot(const Lattice& lat, const FieldConfig& cfg, const PinningSpec& pin);

/// Point estimate with a batch-means error bar.
struct Estimate {
  double value = 0.0;
  /// Absent when fewer than kMinBatches batches are available.
  std::optional<double> standard_error;
  int batches = 0;
  /// Integrated autocorrelation time in units of snapshots (1 = uncorrelated).
  double tau_int = 1.0;

  bool low_data() const { return !standard_error.has_value(); }
};

inline constexpr int kDefaultBatches = 16;
inline constexpr int kMinBatches = 8;

/// Mean of `series` with a batch-means standard error over up to `batches`
/// equal blocks (leading remainder samples are dropped from the blocks but
/// kept in the mean).
Estimate batch_means(std::span<const double> series, int batches = kDefaultBatches);

/// Sokal's self-consistent window estimate of the integrated
/// autocorrelation time; window stops once W >= c * tau(W).
double integrated_autocorrelation(std::span<const double> series, double window_factor = 6.0);

struct Trace;

std::vector<double> series_of(const Trace& trace, const std::function<double(const Snapshot&)>& f);

/// rho_N = E[nu_N] / |Lambda|.
Estimate estimate_rho(const Trace& trace, const Lattice& lat);
Estimate estimate_nu(const Trace& trace);
Estimate estimate_mean_height(const Trace& trace);
Estimate estimate_center_height(const Trace& trace);
Estimate estimate_max_height(const Trace& trace);
Estimate estimate_extra(const Trace& trace);

/// Frequency of nu_N > M with a batch-means error bar.
Estimate tail_probability(const Trace& trace, std::int64_t m);

enum class ScalingModel {
  Constant,  // alpha
  InverseN,  // c / N
  Log,       // alpha + beta log N
  SqrtLog,   // alpha + beta sqrt(log N)
};

std::string to_string(ScalingModel model);

struct ScalingPoint {
  double n;
  double value;
  double se;
};

struct ScalingFit {
  ScalingModel model;
  std::vector<double> coefficients;
  /// Standard errors, inflated by sqrt(chi2 / dof) when that exceeds 1.
  std::vector<double> standard_errors;
  /// Weighted residual sum of squares (chi^2 when SEs are genuine).
  double chi2 = 0.0;
  /// Unweighted Euclidean norm of the residuals.
  double residual_norm = 0.0;
  int dof = 0;
};

/// Weighted least squares with weights 1/SE^2; unit weights if any SE is 0.
/// Needs at least 3 points; throws FitError on a singular design.
ScalingFit fit_scaling(std::span<const ScalingPoint> points, ScalingModel model);

}  // namespace wetting
