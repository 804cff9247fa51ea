#include "emcredit/basket.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace emcredit {

void BasketSpec::validate() const {
  if (!(lstar_a > 0.0)) throw std::invalid_argument("BasketSpec: lstar_a must be > 0");
  if (!(lstar_c > 0.0)) throw std::invalid_argument("BasketSpec: lstar_c must be > 0");
  if (!(rho >= -1.0 && rho <= 1.0))
    throw std::domain_error("BasketSpec: rho must lie in [-1, 1]");
}

double lstar_c_for_grade(const RatingGrade& grade, const RatingSchemes& schemes) {
  return schemes.lstar_c_of(grade);
}

std::vector<double> basket_default_samples(const JointCrossings& joint,
                                           const BasketSpec& spec) {
  spec.validate();
  const auto corp = joint.corporate.times(joint.corporate.barrier_index(spec.lstar_a));
  std::vector<double> tau(corp.begin(), corp.end());
  if (std::isinf(spec.lstar_c)) return tau;  // country never triggers
  const auto ctry = joint.country.times(joint.country.barrier_index(spec.lstar_c));
  for (std::size_t p = 0; p < tau.size(); ++p) tau[p] = std::min(tau[p], ctry[p]);
  return tau;
}

namespace {

std::vector<double> sorted_unique(std::vector<double> levels) {
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  return levels;
}

BasketSpec spec_for_rating(const RatingGrade& grade, const RatingSchemes& schemes,
                           double rho, const BasketOptions& opt) {
  BasketSpec spec;
  spec.rho = rho;
  spec.lstar_a = opt.lstar_a_override.value_or(1.0);
  if (opt.extension1) {
    const bool affected =
        opt.extension1_grades.empty() ||
        std::find(opt.extension1_grades.begin(), opt.extension1_grades.end(), grade) !=
            opt.extension1_grades.end();
    if (affected) spec.lstar_a = opt.extension1_lstar_a;
  }
  if (opt.quasi_sovereign) {
    spec.lstar_c = 1.0;
  } else if (auto it = opt.lstar_c_override.find(grade); it != opt.lstar_c_override.end()) {
    spec.lstar_c = it->second;
  } else {
    spec.lstar_c = lstar_c_for_grade(grade, schemes);
  }
  return spec;
}

}  // namespace

EmCurveResult em_corporate_curve(
    const ProcessParams& country_params,
    const std::map<RatingGrade, ProcessParams>& sector_params_by_rating,
    const RatingSchemes& schemes, double rho, const PathConfig& cfg,
    std::span<const double> tenors, const DiscountCurve& disc,
    const RecoveryAssumption& rec, const BasketOptions& options) {
  if (sector_params_by_rating.empty())
    throw std::invalid_argument("em_corporate_curve: no rating parameters supplied");

  EmCurveResult result;
  for (const auto& [grade, sector_params] : sector_params_by_rating) {
    const BasketSpec spec = spec_for_rating(grade, schemes, rho, options);
    spec.validate();

    std::vector<double> barriers_a = sorted_unique({1.0, spec.lstar_a});
    std::vector<double> barriers_c = {1.0};
    if (!std::isinf(spec.lstar_c)) barriers_c = sorted_unique({1.0, spec.lstar_c});

    const JointCrossings joint = simulate_pair_crossings(
        sector_params, country_params, rho, barriers_a, barriers_c, cfg);

    EmCurveFamily family;
    family.spec = spec;
    family.em = spread_curve(basket_default_samples(joint, spec), disc, rec, tenors);
    family.standalone =
        spread_curve(joint.corporate.times(joint.corporate.barrier_index(1.0)), disc,
                     rec, tenors);
    family.ftd = spread_curve(
        basket_default_samples(joint, BasketSpec{1.0, 1.0, rho}), disc, rec, tenors);
    result.by_rating.emplace(grade, std::move(family));
  }

  // Country curve from its own single-name simulation: invariant across the
  // per-rating joint runs and across basket configuration.
  const double country_barrier[] = {1.0};
  const CrossingRecord country_rec =
      simulate_crossings(country_params, country_barrier, cfg, StreamTag{1});
  result.country = spread_curve(country_rec.times(0), disc, rec, tenors);
  return result;
}

}  // namespace emcredit
