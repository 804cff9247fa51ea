#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "emcredit/rating.hpp"

namespace emcredit {

// One DM bond/CDS observation.
struct Quote {
  double tenor = 0.0;   // years, (0, 30]
  double spread = 0.0;  // decimal, (0, 0.5)
  RatingGrade grade;
  double weight = 1.0;

  void validate() const;
};

// s_k(T) = e^{a_k} + e^{b_k - theta T}: e^{a_k} is the long-term spread,
// e^{a_k} + e^{b_k} the short-term spread, theta shared across ratings.
struct ParametricSpreadCurve {
  std::map<BroadRating, std::pair<double, double>> ab;  // (a_k, b_k) per fitted broad
  double theta = 0.0;

  bool has(BroadRating broad) const { return ab.count(broad) > 0; }
};

double eval_parametric(double a, double b, double theta, double T);

// Spread at (grade, T): broad grades evaluate their own curve; modified
// grades mix the adjacent broad curve values notch-linearly (1/3 per
// notch). Throws std::range_error outside A+..B- or if a needed broad
// curve is missing.
double interpolate_grade_spread(const ParametricSpreadCurve& curve,
                                const RatingGrade& grade, double T);

struct SectorFit {
  ParametricSpreadCurve curve;
  double objective = 0.0;                 // weighted sum of squared relative errors
  std::vector<double> residual_rel;       // per retained quote, (model-mkt)/mkt
  std::vector<Quote> fitted_quotes;       // quotes actually used, fit order
  std::vector<std::string> diagnostics;   // exclusions, ordering warnings
};

// Nine-parameter sector fit: per fixed theta the model is linear in
// (e^{a_k}, e^{b_k}) so the inner problem is solved exactly by weighted
// least squares on relative errors; theta comes from a bracketed
// one-dimensional search on [0.05, 2]. Ratings touched by fewer than two
// quote-weights are excluded with a diagnostic; throws CurveFitError if
// nothing is fittable or theta is unidentifiable (single tenor).
class CurveFitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

SectorFit fit_sector(std::span<const Quote> quotes);

}  // namespace emcredit
