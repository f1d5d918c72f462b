#include "wetting/observables.hpp"

#include <algorithm>
#include <cmath>

#include "wetting/error.hpp"
#include "wetting/sampler.hpp"

namespace wetting {

std::int32_t pinned_count(const FieldConfig& cfg, const PinningSpec& pin) {
  std::int32_t count = 0;
  if (const auto* well = std::get_if<SquareWell>(&pin)) {
    for (double h : cfg.heights) count += (h <= well->a) ? 1 : 0;
  } else if (std::holds_alternative<DeltaPinning>(pin)) {
    for (auto p : cfg.pinned) count += p ? 1 : 0;
  }
  return count;
}

Snapshot take_snapshot(const Lattice& lat, const FieldConfig& cfg, const PinningSpec& pin) {
  Snapshot s;
  s.pinned = pinned_count(cfg, pin);
  double sum = 0.0;
  double top = 0.0;
  for (double h : cfg.heights) {
    sum += h;
    top = std::max(top, h);
  }
  s.mean_height = sum / static_cast<double>(cfg.size());
  s.max_height = top;
  s.center_height = cfg.heights[lat.center()];
  return s;
}

double integrated_autocorrelation(std::span<const double> x, double window_factor) {
  const std::size_t n = x.size();
  if (n < 2) return 1.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double c0 = 0.0;
  for (double v : x) c0 += (v - mean) * (v - mean);
  c0 /= static_cast<double>(n);
  if (!(c0 > 0.0)) return 1.0;
  double tau = 1.0;
  const std::size_t max_lag = n / 4;
  for (std::size_t lag = 1; lag <= max_lag; ++lag) {
    double c = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) c += (x[i] - mean) * (x[i + lag] - mean);
    c /= static_cast<double>(n);
    tau += 2.0 * c / c0;
    if (static_cast<double>(lag) >= window_factor * tau) break;
  }
  return std::max(tau, 1e-3);
}

Estimate batch_means(std::span<const double> series, int batches) {
  if (series.empty()) throw ParameterError("cannot estimate from an empty series");
  Estimate est;
  double sum = 0.0;
  for (double v : series) sum += v;
  const auto n = series.size();
  est.value = sum / static_cast<double>(n);
  est.tau_int = integrated_autocorrelation(series);

  const auto b = static_cast<std::size_t>(std::min<std::size_t>(static_cast<std::size_t>(std::max(batches, 1)), n));
  est.batches = static_cast<int>(b);
  if (est.batches < kMinBatches) return est;
  const std::size_t size = n / b;
  const std::size_t start = n - size * b;
  std::vector<double> means(b, 0.0);
  for (std::size_t k = 0; k < b; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < size; ++i) s += series[start + k * size + i];
    means[k] = s / static_cast<double>(size);
  }
  double mb = 0.0;
  for (double m : means) mb += m;
  mb /= static_cast<double>(b);
  double var = 0.0;
  for (double m : means) var += (m - mb) * (m - mb);
  var /= static_cast<double>(b - 1);
  est.standard_error = std::sqrt(var / static_cast<double>(b));
  return est;
}

std::vector<double> series_of(const Trace& trace, const std::function<double(const Snapshot&)>& f) {
  std::vector<double> out;
  out.reserve(trace.snapshots.size());
  for (const auto& s : trace.snapshots) out.push_back(f(s));
  return out;
}

Estimate estimate_rho(const Trace& trace, const Lattice& lat) {
  const double volume = static_cast<double>(lat.size());
  return batch_means(series_of(trace, [volume](const Snapshot& s) { return s.pinned / volume; }));
}

Estimate estimate_nu(const Trace& trace) {
  return batch_means(series_of(trace, [](const Snapshot& s) { return static_cast<double>(s.pinned); }));
}

Estimate estimate_mean_height(const Trace& trace) {
  return batch_means(series_of(trace, [](const Snapshot& s) { return s.mean_height; }));
}

Estimate estimate_center_height(const Trace& trace) {
  return batch_means(series_of(trace, [](const Snapshot& s) { return s.center_height; }));
}

Estimate estimate_max_height(const Trace& trace) {
  return batch_means(series_of(trace, [](const Snapshot& s) { return s.max_height; }));
}

Estimate estimate_extra(const Trace& trace) {
  return batch_means(series_of(trace, [](const Snapshot& s) { return s.extra; }));
}

Estimate tail_probability(const Trace& trace, std::int64_t m) {
  return batch_means(series_of(trace, [m](const Snapshot& s) {
    return static_cast<std::int64_t>(s.pinned) > m ? 1.0 : 0.0;
  }));
}

std::string to_string(ScalingModel model) {
  switch (model) {
    case ScalingModel::Constant:
      return "constant";
    case ScalingModel::InverseN:
      return "c/N";
    case ScalingModel::Log:
      return "alpha+beta*log(N)";
    case ScalingModel::SqrtLog:
      return "alpha+beta*sqrt(log(N))";
  }
  return "?";
}

ScalingFit fit_scaling(std::span<const ScalingPoint> points, ScalingModel model) {
  if (points.size() < 3) throw FitError("scaling fit needs at least 3 points");
  auto basis = [model](double n) -> std::vector<double> {
    if (!(n > 0.0)) throw FitError("scaling fit needs N > 0");
    switch (model) {
      case ScalingModel::Constant:
        return {1.0};
      case ScalingModel::InverseN:
        return {1.0 / n};
      case ScalingModel::Log:
        return {1.0, std::log(n)};
      case ScalingModel::SqrtLog:
        if (n < 1.0) throw FitError("sqrt(log N) model needs N >= 1");
        return {1.0, std::sqrt(std::log(n))};
    }
    return {};
  };
  const bool unit = std::any_of(points.begin(), points.end(),
                                [](const ScalingPoint& p) { return !(p.se > 0.0); });
  const std::size_t k = basis(points.front().n).size();

  // Normal equations (k <= 2).
  double a00 = 0, a01 = 0, a11 = 0, r0 = 0, r1 = 0;
  for (const auto& p : points) {
    const auto f = basis(p.n);
    const double w = unit ? 1.0 : 1.0 / (p.se * p.se);
    a00 += w * f[0] * f[0];
    r0 += w * f[0] * p.value;
    if (k == 2) {
      a01 += w * f[0] * f[1];
      a11 += w * f[1] * f[1];
      r1 += w * f[1] * p.value;
    }
  }
  ScalingFit fit;
  fit.model = model;
  std::vector<double> cov_diag;
  if (k == 1) {
    if (!(a00 > 0.0)) throw FitError("singular scaling design");
    fit.coefficients = {r0 / a00};
    cov_diag = {1.0 / a00};
  } else {
    const double det = a00 * a11 - a01 * a01;
    if (!(std::abs(det) > 1e-12 * std::max(1.0, a00 * a11))) throw FitError("singular scaling design");
    fit.coefficients = {(a11 * r0 - a01 * r1) / det, (a00 * r1 - a01 * r0) / det};
    cov_diag = {a11 / det, a00 / det};
  }

  double chi2 = 0.0;
  double rss = 0.0;
  for (const auto& p : points) {
    const auto f = basis(p.n);
    double pred = 0.0;
    for (std::size_t i = 0; i < k; ++i) pred += fit.coefficients[i] * f[i];
    const double r = p.value - pred;
    const double w = unit ? 1.0 : 1.0 / (p.se * p.se);
    chi2 += w * r * r;
    rss += r * r;
  }
  fit.chi2 = chi2;
  fit.residual_norm = std::sqrt(rss);
  fit.dof = static_cast<int>(points.size() - k);
  const double reduced = fit.dof > 0 ? chi2 / fit.dof : 0.0;
  const double scale = unit ? reduced : std::max(1.0, reduced);
  for (double c : cov_diag) fit.standard_errors.push_back(std::sqrt(c * scale));
  return fit;
}

}  // namespace wetting
