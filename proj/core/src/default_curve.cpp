#include "emcredit/default_curve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "emcredit/simulate.hpp"

namespace emcredit {

DiscountCurve DiscountCurve::flat(double rate) {
  DiscountCurve curve;
  curve.forwards_ = {rate};
  curve.log_df_ = {0.0};
  return curve;
}

DiscountCurve DiscountCurve::piecewise(std::vector<double> tenors,
                                       std::vector<double> forwards) {
  if (forwards.empty() || forwards.size() != tenors.size() + 1)
    throw std::invalid_argument("DiscountCurve: need n bucket edges and n+1 forwards");
  double prev = 0.0;
  for (double t : tenors) {
    if (!(t > prev)) throw std::invalid_argument("DiscountCurve: tenors must increase");
    prev = t;
  }
  DiscountCurve curve;
  curve.tenors_ = std::move(tenors);
  curve.forwards_ = std::move(forwards);
  curve.log_df_.resize(curve.tenors_.size() + 1, 0.0);
  double left = 0.0;
  for (std::size_t i = 0; i < curve.tenors_.size(); ++i) {
    curve.log_df_[i + 1] = curve.log_df_[i] - curve.forwards_[i] * (curve.tenors_[i] - left);
    left = curve.tenors_[i];
  }
  return curve;
}

double DiscountCurve::df(double t) const {
  if (t < 0.0) throw std::domain_error("DiscountCurve: t must be >= 0");
  if (tenors_.empty()) return std::exp(-forwards_[0] * t);
  const auto it = std::lower_bound(tenors_.begin(), tenors_.end(), t);
  const std::size_t bucket = static_cast<std::size_t>(it - tenors_.begin());
  const double left = bucket == 0 ? 0.0 : tenors_[bucket - 1];
  return std::exp(log_df_[bucket] - forwards_[bucket] * (t - left));
}

DefaultCurve estimate_default_curve(std::span<const double> default_times,
                                    std::span<const double> grid) {
  if (default_times.empty())
    throw std::invalid_argument("estimate_default_curve: empty sample");
  double prev = 0.0;
  for (double t : grid) {
    if (!(t > prev))
      throw std::invalid_argument("estimate_default_curve: grid must be increasing and > 0");
    prev = t;
  }
  std::vector<double> sorted(default_times.begin(), default_times.end());
  std::sort(sorted.begin(), sorted.end());

  DefaultCurve curve;
  curve.grid.assign(grid.begin(), grid.end());
  curve.n_paths = default_times.size();
  curve.p.reserve(grid.size());
  curve.se.reserve(grid.size());
  const double n = static_cast<double>(curve.n_paths);
  for (double t : grid) {
    const auto count = std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin();
    const double p = static_cast<double>(count) / n;
    curve.p.push_back(p);
    curve.se.push_back(std::sqrt(p * (1.0 - p) / n));
  }
  return curve;
}

namespace {

// P interpolated linearly on the grid, with P(0) = 0.
double curve_p_at(const DefaultCurve& curve, std::span<const double> p, double t) {
  const auto it = std::lower_bound(curve.grid.begin(), curve.grid.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - curve.grid.begin());
  if (i < curve.grid.size() && curve.grid[i] == t) return p[i];
  const double t0 = i == 0 ? 0.0 : curve.grid[i - 1];
  const double p0 = i == 0 ? 0.0 : p[i - 1];
  const double t1 = curve.grid[i];
  return p0 + (p[i] - p0) * (t - t0) / (t1 - t0);
}

double par_spread_impl(const DefaultCurve& curve, std::span<const double> p,
                       const DiscountCurve& disc, const RecoveryAssumption& rec,
                       double maturity) {
  if (!(maturity > 0.0) || maturity > curve.grid.back() * (1.0 + 1e-12))
    throw std::range_error("par_spread: maturity outside curve grid");
  double default_leg = 0.0;
  double annuity = 0.0;
  double t0 = 0.0, p0 = 0.0;
  for (std::size_t i = 0; i < curve.grid.size() && t0 < maturity; ++i) {
    const double t1 = std::min(curve.grid[i], maturity);
    const double p1 = t1 == curve.grid[i] ? p[i] : curve_p_at(curve, p, t1);
    const double dp = std::max(p1 - p0, 0.0);
    default_leg += disc.df(0.5 * (t0 + t1)) * dp;
    annuity += 0.5 * (disc.df(t0) * (1.0 - p0) + disc.df(t1) * (1.0 - p1)) * (t1 - t0);
    t0 = t1;
    p0 = p1;
  }
  if (!(annuity > 1e-12))
    throw std::runtime_error("par_spread: degenerate credit, risky annuity is zero");
  return (1.0 - rec.recovery) * default_leg / annuity;
}

}  // namespace

double par_spread(const DefaultCurve& curve, const DiscountCurve& disc,
                  const RecoveryAssumption& rec, double maturity) {
  if (curve.grid.empty()) throw std::invalid_argument("par_spread: empty curve");
  if (rec.recovery < 0.0 || rec.recovery >= 1.0)
    throw std::invalid_argument("par_spread: recovery must lie in [0, 1)");
  return par_spread_impl(curve, curve.p, disc, rec, maturity);
}

std::vector<double> pricing_grid(std::span<const double> tenors) {
  if (tenors.empty()) throw std::invalid_argument("pricing_grid: no tenors");
  double t_max = 0.0;
  for (double t : tenors) {
    if (!(t > 0.0)) throw std::invalid_argument("pricing_grid: tenors must be > 0");
    t_max = std::max(t_max, t);
  }
  std::vector<double> grid;
  const auto n_months = static_cast<std::size_t>(std::ceil(t_max * 12.0 - 1e-9));
  grid.reserve(n_months + tenors.size());
  for (std::size_t m = 1; m <= n_months; ++m) grid.push_back(static_cast<double>(m) / 12.0);
  grid.insert(grid.end(), tenors.begin(), tenors.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-12; }),
             grid.end());
  return grid;
}

SpreadCurve spread_curve(std::span<const double> default_times,
                         const DiscountCurve& disc, const RecoveryAssumption& rec,
                         std::span<const double> tenors) {
  const std::vector<double> grid = pricing_grid(tenors);
  const DefaultCurve curve = estimate_default_curve(default_times, grid);

  std::vector<double> p_up(curve.p.size()), p_dn(curve.p.size());
  for (std::size_t i = 0; i < curve.p.size(); ++i) {
    p_up[i] = std::min(curve.p[i] + curve.se[i], 1.0);
    p_dn[i] = std::max(curve.p[i] - curve.se[i], 0.0);
  }

  SpreadCurve out;
  out.tenors.assign(tenors.begin(), tenors.end());
  out.spread.reserve(tenors.size());
  out.se.reserve(tenors.size());
  for (double T : tenors) {
    const double s = par_spread_impl(curve, curve.p, disc, rec, T);
    double s_up = s, s_dn = s;
    try {
      s_up = par_spread_impl(curve, p_up, disc, rec, T);
      s_dn = par_spread_impl(curve, p_dn, disc, rec, T);
    } catch (const std::runtime_error&) {
      // p + se saturating at 1 can degenerate the perturbed annuity even
      // when the base curve prices; keep the base spread as the bound.
    }
    out.spread.push_back(s);
    out.se.push_back(0.5 * (s_up - s_dn));
  }
  return out;
}

}  // namespace emcredit
