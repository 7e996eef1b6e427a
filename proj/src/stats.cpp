#include "slabperc/stats.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "slabperc/geometry.hpp"

namespace slabperc {

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
  if (trials == 0) throw DomainError("wilson interval needs at least one trial");
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (phat + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  Interval out{std::max(0.0, centre - half), std::min(1.0, centre + half)};
  // Exact endpoints at the degenerate counts.
  if (successes == 0) out.lo = 0.0;
  if (successes == trials) out.hi = 1.0;
  return out;
}

double proportion_se(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) throw DomainError("standard error needs at least one trial");
  const double n = static_cast<double>(trials);
  const double q = (static_cast<double>(successes) + 1.0) / (n + 2.0);
  return std::sqrt(q * (1.0 - q) / n);
}

LineFit weighted_line_fit(std::span<const double> x, std::span<const double> y,
                          std::span<const double> sigma) {
  const auto n = static_cast<Eigen::Index>(x.size());
  if (y.size() != x.size() || sigma.size() != x.size())
    throw DomainError("fit inputs differ in length");
  if (n < 2) throw DomainError("line fit needs at least two points");
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(sigma[i] > 0.0)) throw DomainError("fit weights need positive sigma");
    const double w = 1.0 / sigma[i];
    A(i, 0) = w;
    A(i, 1) = w * x[i];
    b(i) = w * y[i];
  }
  const Eigen::Vector2d beta = A.colPivHouseholderQr().solve(b);
  const Eigen::Matrix2d cov = (A.transpose() * A).inverse();
  LineFit fit;
  fit.intercept = beta(0);
  fit.slope = beta(1);
  fit.chi2 = (A * beta - b).squaredNorm();
  fit.dof = static_cast<int>(n) - 2;
  const double scale = fit.dof > 0 ? std::max(1.0, fit.chi2 / fit.dof) : 1.0;
  fit.intercept_se = std::sqrt(cov(0, 0) * scale);
  fit.slope_se = std::sqrt(cov(1, 1) * scale);
  return fit;
}

}  // namespace slabperc
