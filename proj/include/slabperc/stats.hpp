// Binomial confidence intervals and weighted straight-line fits.
#pragma once

#include <cstdint>
#include <span>

namespace slabperc {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double half_width() const { return 0.5 * (hi - lo); }
  bool contains(double v) const { return v >= lo && v <= hi; }
};

inline constexpr double kZ95 = 1.959963984540054;

/// Wilson score interval for `successes` out of `trials` at normal quantile z.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kZ95);

/// Standard error of a proportion, with the (s+1)/(n+2) correction so that
/// degenerate counts still carry a positive error.
double proportion_se(std::uint64_t successes, std::uint64_t trials);

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double slope_se = 0.0;
  double intercept_se = 0.0;
  /// Weighted residual sum of squares.
  double chi2 = 0.0;
  int dof = 0;
};

/// Weighted least squares fit of y = intercept + slope * x with weights
/// 1/sigma^2. Standard errors are inflated by sqrt(chi2/dof) when that
/// exceeds one.
LineFit weighted_line_fit(std::span<const double> x, std::span<const double> y,
                          std::span<const double> sigma);

}  // namespace slabperc
