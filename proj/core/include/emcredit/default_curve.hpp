#pragma once

#include <span>
#include <vector>

namespace emcredit {

// Cumulative default probability on an increasing tenor grid, with the
// binomial standard error of each point.
struct DefaultCurve {
  std::vector<double> grid;  // years, increasing, > 0
  std::vector<double> p;     // cumulative default probability
  std::vector<double> se;    // sqrt(p(1-p)/n)
  std::size_t n_paths = 0;
};

// Riskfree discounting: flat continuously-compounded rate or
// piecewise-constant forward rates on a tenor grid.
class DiscountCurve {
 public:
  static DiscountCurve flat(double rate);
  static DiscountCurve piecewise(std::vector<double> tenors,
                                 std::vector<double> forwards);

  double df(double t) const;

 private:
  DiscountCurve() = default;
  std::vector<double> tenors_;    // right edges of forward buckets
  std::vector<double> forwards_;  // last bucket extends beyond tenors_.back()
  std::vector<double> log_df_;    // cumulative -int r at bucket edges
};

struct RecoveryAssumption {
  double recovery = 0.40;
};

// p(t) = fraction of default times <= t; se = sqrt(p(1-p)/n).
// default_times uses kNever (+inf) for paths that never default.
DefaultCurve estimate_default_curve(std::span<const double> default_times,
                                    std::span<const double> grid);

// Par CDS spread (decimal per year) for protection to maturity T:
//   s(T) = (1-R) * int_0^T B(t) dP(t) / int_0^T B(t)(1-P(t)) dt
// with the default leg summed as B(midpoint) * dP over grid intervals and
// the risky annuity integrated by the trapezoid rule. Throws
// std::range_error if T is outside the curve grid and std::runtime_error
// if the risky annuity degenerates (P = 1 over the horizon).
double par_spread(const DefaultCurve& curve, const DiscountCurve& disc,
                  const RecoveryAssumption& rec, double maturity);

// Spreads at the requested tenors, with a standard error obtained by
// re-pricing the curve at p +/- se.
struct SpreadCurve {
  std::vector<double> tenors;
  std::vector<double> spread;  // decimal
  std::vector<double> se;      // decimal
};

// Grid used for pricing: monthly points to max(tenors), merged with the
// tenors themselves.
std::vector<double> pricing_grid(std::span<const double> tenors);

SpreadCurve spread_curve(std::span<const double> default_times,
                         const DiscountCurve& disc, const RecoveryAssumption& rec,
                         std::span<const double> tenors);

}  // namespace emcredit
