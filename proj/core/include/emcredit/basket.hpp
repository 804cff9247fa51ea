#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "emcredit/default_curve.hpp"
#include "emcredit/process.hpp"
#include "emcredit/rating.hpp"
#include "emcredit/simulate.hpp"

namespace emcredit {

// Generalised two-barrier basket default time:
//   tau_b = first passage of X^a below -lstar_a  ^  first passage of X^c below -lstar_c.
// lstar_a = lstar_c = 1 is the plain FtD; lstar_c > 1 the modified FtD;
// lstar_a > 1 with lstar_c = 1 the quasi-sovereign; lstar_a < 1 reprices
// sector risk wider. lstar_c = +inf disables the country leg entirely.
struct BasketSpec {
  double lstar_a = 1.0;
  double lstar_c = 1.0;  // may be kNever (+inf) as the "no country effect" sentinel
  double rho = 0.80;

  void validate() const;
};

// Country barrier depth for a grade: broad grades from the scheme table,
// modified grades notch-linear between the adjacent broad values.
double lstar_c_for_grade(const RatingGrade& grade, const RatingSchemes& schemes);

// Per-path basket default times drawn from one joint scenario. Requires
// both barrier depths to be present in the respective records.
std::vector<double> basket_default_samples(const JointCrossings& joint,
                                           const BasketSpec& spec);

// Basket shape knobs applied on top of the rating scheme when building
// rating-indexed EM curves.
struct BasketOptions {
  std::optional<double> lstar_a_override;          // uniform corporate depth
  bool extension1 = false;                         // sector risk priced wider in EM
  double extension1_lstar_a = 0.85;
  std::vector<RatingGrade> extension1_grades;      // empty = every rating
  bool quasi_sovereign = false;                    // full country exposure: lstar_c = 1
  std::map<RatingGrade, double> lstar_c_override;  // per-grade country depth
};

struct EmCurveFamily {
  SpreadCurve em;          // generalised basket at this rating's depths
  SpreadCurve standalone;  // corporate leg at barrier 1, same paths
  SpreadCurve ftd;         // plain FtD (both depths 1), same paths
  BasketSpec spec;
};

struct EmCurveResult {
  std::map<RatingGrade, EmCurveFamily> by_rating;
  SpreadCurve country;  // single-name country curve at barrier 1
};

// For each rating: one joint simulation (common random numbers across the
// basket variants), basket composition at the rating's (lstar_a, lstar_c),
// and par-spread pricing.
EmCurveResult em_corporate_curve(
    const ProcessParams& country_params,
    const std::map<RatingGrade, ProcessParams>& sector_params_by_rating,
    const RatingSchemes& schemes, double rho, const PathConfig& cfg,
    std::span<const double> tenors, const DiscountCurve& disc,
    const RecoveryAssumption& rec, const BasketOptions& options = {});

}  // namespace emcredit
