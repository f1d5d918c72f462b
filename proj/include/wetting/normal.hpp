#pragma once

// Standard normal tail and interval masses that stay accurate far out in the
// tails, where 1 - Phi(z) underflows or cancels.

namespace wetting::normal {

/// log(1 - Phi(z)).
double log_upper_tail(double z);

/// log(Phi(hi) - Phi(lo)) for lo < hi; either end may be infinite.
double log_interval_mass(double lo, double hi);

/// Phi^{-1}(p) for p in (0, 1).
double quantile(double p);

/// Inverse of the upper tail: z with 1 - Phi(z) = q, q in (0, 1).
double upper_quantile(double q);

/// log(1 - exp(x)) for x < 0.
double log1mexp(double x);

/// log(exp(a) + exp(b)).
double log_add(double a, double b);

}  // namespace wetting::normal
