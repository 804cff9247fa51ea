#include "emcredit/curve_fit.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "emcredit/optimize.hpp"

namespace emcredit {

void Quote::validate() const {
  if (!(tenor > 0.0 && tenor <= 30.0))
    throw std::invalid_argument("Quote: tenor must lie in (0, 30] years");
  if (!(spread > 0.0 && spread < 0.5))
    throw std::invalid_argument("Quote: spread must lie in (0, 0.5)");
  if (!(weight > 0.0)) throw std::invalid_argument("Quote: weight must be > 0");
}

double eval_parametric(double a, double b, double theta, double T) {
  if (T < 0.0) throw std::domain_error("eval_parametric: T must be >= 0");
  return std::exp(a) + std::exp(b - theta * T);
}

namespace {

// Notch-linear mixture of the two adjacent broad grades; positions past
// the anchor span (A+, B-) clamp to the nearest anchor.
struct BroadMix {
  BroadRating lo, hi;  // lo = better rating
  double hi_weight;    // weight on `hi`; 0 for broad grades
};

BroadMix broad_mix(const RatingGrade& grade) {
  const double pos = std::clamp(static_cast<double>(grade.notch()), 1.0, 10.0);
  const int lo = std::min(static_cast<int>((pos - 1.0) / 3.0), 2);
  const double frac = (pos - (1.0 + 3.0 * lo)) / 3.0;
  return {static_cast<BroadRating>(lo), static_cast<BroadRating>(lo + 1), frac};
}

constexpr double kThetaLo = 0.05;
constexpr double kThetaHi = 2.0;
constexpr double kMinExp = 1e-12;  // positivity floor for e^a, e^b

struct Workspace {
  std::vector<Quote> quotes;                 // retained quotes
  std::vector<BroadRating> fitted;           // broad ratings being fitted
  std::vector<int> column_of;                // BroadRating -> column pair index, -1 if excluded

  int col(BroadRating broad) const { return column_of[static_cast<int>(broad)]; }
};

// Mixture weights of a quote on the fitted broad columns.
void mix_weights(const Workspace& ws, const RatingGrade& grade,
                 std::array<std::pair<int, double>, 2>& out, int& n_out) {
  const BroadMix mix = broad_mix(grade);
  n_out = 0;
  if (mix.hi_weight < 1.0)
    out[n_out++] = {ws.col(mix.lo), 1.0 - mix.hi_weight};
  if (mix.hi_weight > 0.0)
    out[n_out++] = {ws.col(mix.hi), mix.hi_weight};
}

// Weighted linear least squares in x = (e^{a_k}, e^{b_k}) for fixed theta,
// with a tiny active-set loop enforcing positivity. Returns the objective.
double solve_fixed_theta(const Workspace& ws, double theta, std::vector<double>& x) {
  const std::size_t m = ws.fitted.size();
  const std::size_t n = 2 * m;
  std::vector<char> fixed(n, 0);
  x.assign(n, 0.0);

  for (int pass = 0; pass < static_cast<int>(n) + 1; ++pass) {
    std::vector<double> ata(n * n, 0.0), atb(n, 0.0);
    std::array<std::pair<int, double>, 2> cols{};
    int n_cols = 0;
    std::vector<double> row(n);
    for (const Quote& q : ws.quotes) {
      std::fill(row.begin(), row.end(), 0.0);
      mix_weights(ws, q.grade, cols, n_cols);
      const double decay = std::exp(-theta * q.tenor);
      for (int i = 0; i < n_cols; ++i) {
        row[2 * cols[i].first] = cols[i].second / q.spread;
        row[2 * cols[i].first + 1] = cols[i].second * decay / q.spread;
      }
      double rhs = 1.0;
      for (std::size_t j = 0; j < n; ++j)
        if (fixed[j]) rhs -= row[j] * kMinExp;
      for (std::size_t j = 0; j < n; ++j) {
        if (fixed[j] || row[j] == 0.0) continue;
        atb[j] += q.weight * row[j] * rhs;
        for (std::size_t k = 0; k < n; ++k)
          if (!fixed[k]) ata[j * n + k] += q.weight * row[j] * row[k];
      }
    }
    // collapse fixed coordinates so the reduced system stays nonsingular
    std::vector<std::size_t> free_idx;
    for (std::size_t j = 0; j < n; ++j)
      if (!fixed[j]) free_idx.push_back(j);
    std::vector<double> a_red(free_idx.size() * free_idx.size());
    std::vector<double> b_red(free_idx.size());
    for (std::size_t r = 0; r < free_idx.size(); ++r) {
      b_red[r] = atb[free_idx[r]];
      for (std::size_t c = 0; c < free_idx.size(); ++c)
        a_red[r * free_idx.size() + c] = ata[free_idx[r] * n + free_idx[c]];
    }
    std::vector<double> sol;
    try {
      sol = optimize::solve_linear_system(std::move(a_red), std::move(b_red),
                                          free_idx.size());
    } catch (const std::runtime_error&) {
      throw CurveFitError("fit_sector: underdetermined design (collinear quotes)");
    }
    bool clamped = false;
    for (std::size_t r = 0; r < free_idx.size(); ++r) {
      x[free_idx[r]] = sol[r];
      if (sol[r] < kMinExp) {
        fixed[free_idx[r]] = 1;
        clamped = true;
      }
    }
    if (!clamped) break;
  }
  for (std::size_t j = 0; j < n; ++j)
    if (fixed[j]) x[j] = kMinExp;

  double objective = 0.0;
  std::array<std::pair<int, double>, 2> cols{};
  int n_cols = 0;
  for (const Quote& q : ws.quotes) {
    mix_weights(ws, q.grade, cols, n_cols);
    const double decay = std::exp(-theta * q.tenor);
    double model = 0.0;
    for (int i = 0; i < n_cols; ++i)
      model += cols[i].second * (x[2 * cols[i].first] + x[2 * cols[i].first + 1] * decay);
    const double rel = (model - q.spread) / q.spread;
    objective += q.weight * rel * rel;
  }
  return objective;
}

}  // namespace

double interpolate_grade_spread(const ParametricSpreadCurve& curve,
                                const RatingGrade& grade, double T) {
  const BroadMix mix = broad_mix(grade);
  double value = 0.0;
  for (const auto& [broad, w] : {std::pair{mix.lo, 1.0 - mix.hi_weight},
                                 std::pair{mix.hi, mix.hi_weight}}) {
    if (w == 0.0) continue;
    const auto it = curve.ab.find(broad);
    if (it == curve.ab.end())
      throw std::range_error("interpolate_grade_spread: no fitted curve for " +
                             to_string(broad));
    value += w * eval_parametric(it->second.first, it->second.second, curve.theta, T);
  }
  return value;
}

SectorFit fit_sector(std::span<const Quote> quotes) {
  if (quotes.empty()) throw CurveFitError("fit_sector: no quotes");
  for (const Quote& q : quotes) q.validate();

  SectorFit fit;
  Workspace ws;
  ws.quotes.assign(quotes.begin(), quotes.end());

  // Iterate exclusion of underdetermined ratings until the retained set is
  // stable: a rating needs total mixture weight >= 2 and quotes spanning at
  // least two tenors.
  std::array<bool, 4> excluded{};
  for (;;) {
    std::array<double, 4> weight_sum{};
    std::array<std::set<double>, 4> tenors_touching;
    for (const Quote& q : ws.quotes) {
      const BroadMix mix = broad_mix(q.grade);
      weight_sum[static_cast<int>(mix.lo)] += 1.0 - mix.hi_weight;
      weight_sum[static_cast<int>(mix.hi)] += mix.hi_weight;
      if (mix.hi_weight < 1.0) tenors_touching[static_cast<int>(mix.lo)].insert(q.tenor);
      if (mix.hi_weight > 0.0) tenors_touching[static_cast<int>(mix.hi)].insert(q.tenor);
    }
    bool changed = false;
    for (BroadRating broad : kBroadRatings) {
      const int i = static_cast<int>(broad);
      if (excluded[i] || weight_sum[i] == 0.0) continue;
      if (weight_sum[i] < 2.0 - 1e-9 || tenors_touching[i].size() < 2) {
        excluded[i] = true;
        changed = true;
        fit.diagnostics.push_back("rating " + to_string(broad) +
                                  " excluded: underdetermined (needs two quotes "
                                  "at distinct tenors)");
      }
    }
    if (!changed) break;
    std::vector<Quote> kept;
    for (const Quote& q : ws.quotes) {
      const BroadMix mix = broad_mix(q.grade);
      const bool uses_excluded =
          (mix.hi_weight < 1.0 && excluded[static_cast<int>(mix.lo)]) ||
          (mix.hi_weight > 0.0 && excluded[static_cast<int>(mix.hi)]);
      if (uses_excluded)
        fit.diagnostics.push_back("quote " + to_string(q.grade) + " @" +
                                  std::to_string(q.tenor) +
                                  "y dropped: references an excluded rating");
      else
        kept.push_back(q);
    }
    ws.quotes = std::move(kept);
  }

  ws.column_of.assign(4, -1);
  for (BroadRating broad : kBroadRatings) {
    bool touched = false;
    for (const Quote& q : ws.quotes) {
      const BroadMix mix = broad_mix(q.grade);
      touched |= (mix.hi_weight < 1.0 && mix.lo == broad) ||
                 (mix.hi_weight > 0.0 && mix.hi == broad);
    }
    if (touched && !excluded[static_cast<int>(broad)]) {
      ws.column_of[static_cast<int>(broad)] = static_cast<int>(ws.fitted.size());
      ws.fitted.push_back(broad);
    }
  }
  if (ws.fitted.empty()) throw CurveFitError("fit_sector: no fittable rating");

  std::set<double> distinct_tenors;
  for (const Quote& q : ws.quotes) distinct_tenors.insert(q.tenor);
  if (distinct_tenors.size() < 2)
    throw CurveFitError("fit_sector: theta unidentifiable, all quotes at one tenor");

  // Outer search over theta: coarse geometric grid, then golden refinement
  // around the best cell.
  std::vector<double> x;
  const auto profile = [&](double theta) { return solve_fixed_theta(ws, theta, x); };
  constexpr int kGrid = 48;
  double best_theta = kThetaLo;
  double best_val = profile(kThetaLo);
  std::vector<double> thetas(kGrid);
  for (int i = 0; i < kGrid; ++i) {
    thetas[i] = kThetaLo * std::pow(kThetaHi / kThetaLo, static_cast<double>(i) /
                                                             (kGrid - 1));
    const double value = profile(thetas[i]);
    if (value < best_val) {
      best_val = value;
      best_theta = thetas[i];
    }
  }
  const auto it = std::lower_bound(thetas.begin(), thetas.end(), best_theta);
  const std::size_t idx = static_cast<std::size_t>(it - thetas.begin());
  const double lo = idx == 0 ? kThetaLo : thetas[idx - 1];
  const double hi = idx + 1 >= thetas.size() ? kThetaHi : thetas[idx + 1];
  const auto refined = optimize::golden_minimize(profile, lo, hi, 1e-11, 300);

  fit.objective = solve_fixed_theta(ws, refined.x, x);
  fit.curve.theta = refined.x;
  for (std::size_t i = 0; i < ws.fitted.size(); ++i)
    fit.curve.ab[ws.fitted[i]] = {std::log(x[2 * i]), std::log(x[2 * i + 1])};

  fit.fitted_quotes = ws.quotes;
  for (const Quote& q : ws.quotes) {
    const double model = interpolate_grade_spread(fit.curve, q.grade, q.tenor);
    fit.residual_rel.push_back((model - q.spread) / q.spread);
  }
  // ordering sanity: lower grade should not be tighter at 5y
  for (std::size_t i = 0; i + 1 < ws.fitted.size(); ++i) {
    const auto& hi_ab = fit.curve.ab[ws.fitted[i]];
    const auto& lo_ab = fit.curve.ab[ws.fitted[i + 1]];
    const double s_hi = eval_parametric(hi_ab.first, hi_ab.second, fit.curve.theta, 5.0);
    const double s_lo = eval_parametric(lo_ab.first, lo_ab.second, fit.curve.theta, 5.0);
    if (s_lo < s_hi)
      fit.diagnostics.push_back("warning: " + to_string(ws.fitted[i + 1]) +
                                " fits tighter than " + to_string(ws.fitted[i]) +
                                " at 5y");
  }
  return fit;
}

}  // namespace emcredit
