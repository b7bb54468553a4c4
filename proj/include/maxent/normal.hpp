#pragma once

namespace maxent {

/// Standard normal CDF via erfc; accurate in relative terms on the lower tail.
double normal_cdf(double x);

/// Standard normal quantile Phi^{-1}(p) for p in (0,1).
///
/// Wichura's AS241 (PPND16) rational approximation followed by one Halley
/// step against normal_cdf; absolute error is at the level of double rounding.
/// Returns -inf / +inf at p = 0 / 1 and NaN outside [0,1].
double normal_quantile(double p);

}  // namespace maxent
