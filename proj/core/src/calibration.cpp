#include "emcredit/calibration.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <optional>
#include <unordered_map>

#include "emcredit/optimize.hpp"
#include "emcredit/simulate.hpp"

namespace emcredit {

void CalibrationTarget::validate(bool sector) const {
  if (tenors.size() != spreads.size() || tenors.empty())
    throw std::invalid_argument("CalibrationTarget: tenors/spreads mismatch");
  for (double s : spreads)
    if (!(s > 0.0))
      throw std::invalid_argument("CalibrationTarget: spreads must be > 0 (" + label + ")");
  if (sector) {
    if (tenors.size() != 3 || tenors[0] != 2.0 || tenors[1] != 5.0 || tenors[2] != 10.0)
      throw std::invalid_argument(
          "CalibrationTarget: sector targets quote exactly {2, 5, 10} years");
  } else {
    double prev = 0.0;
    for (double t : tenors) {
      if (!(t > prev))
        throw std::invalid_argument("CalibrationTarget: tenors must increase");
      prev = t;
    }
  }
  if (!(lambda >= 0.0))
    throw std::invalid_argument("CalibrationTarget: lambda must be >= 0");
}

McPricingOracle::McPricingOracle(double lambda, std::vector<double> tenors, McOracleConfig cfg)
    : lambda_(lambda), tenors_(std::move(tenors)), cfg_(cfg) {
  if (tenors_.empty()) throw std::invalid_argument("McPricingOracle: no tenors");
}

std::vector<double> McPricingOracle::operator()(double sigma, double xi) const {
  const ProcessParams params(sigma, lambda_, xi);
  PathConfig path_cfg;
  const double n_steps = std::ceil(tenors_.back() / cfg_.dt - 1e-9);
  path_cfg.horizon = n_steps * cfg_.dt;
  path_cfg.dt = cfg_.dt;
  path_cfg.n_paths = cfg_.n_paths;
  path_cfg.seed = cfg_.seed;
  path_cfg.record_terminal = false;
  path_cfg.n_threads = cfg_.n_threads;
  const double barrier[] = {1.0};
  const CrossingRecord rec = simulate_crossings(params, barrier, path_cfg);
  const SpreadCurve curve =
      spread_curve(rec.times(0), DiscountCurve::flat(cfg_.discount_rate),
                   RecoveryAssumption{cfg_.recovery}, tenors_);
  return curve.spread;
}

namespace {

constexpr std::array<double, 5> kGridAxis = {0.08, 0.16, 0.30, 0.55, 1.00};
constexpr double kBoxLo = 0.02;
constexpr double kBoxHi = 2.0;
constexpr int kRestarts = 4;
constexpr int kMaxNmEvals = 90;
// Objective below which further restarts cannot change the verdict.
constexpr double kRestartSkip = 0.005;

double max_rel_error(const std::vector<double>& model, const std::vector<double>& target) {
  double worst = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i)
    worst = std::max(worst, std::abs(model[i] - target[i]) / target[i]);
  return worst;
}

double rms_rel_error(const std::vector<double>& model, const std::vector<double>& target) {
  double sum = 0.0;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const double rel = (model[i] - target[i]) / target[i];
    sum += rel * rel;
  }
  return std::sqrt(sum / static_cast<double>(model.size()));
}

// Derivative-free 2-d minimisation: coarse grid, then Nelder-Mead from the
// best grid points. Evaluations are memoised; the oracle itself stays
// memo-free so its determinism is observable.
CalibrationResult minimize_2d(const std::function<double(double, double)>& objective,
                              const std::string& label) {
  std::unordered_map<std::uint64_t, double> memo;
  int evals = 0;
  const auto eval = [&](std::array<double, 2> p) {
    const float fs = static_cast<float>(p[0]);
    const float fx = static_cast<float>(p[1]);
    std::uint64_t key = static_cast<std::uint64_t>(std::bit_cast<std::uint32_t>(fs)) |
                        (static_cast<std::uint64_t>(std::bit_cast<std::uint32_t>(fx)) << 32);
    if (const auto it = memo.find(key); it != memo.end()) return it->second;
    ++evals;
    const double value = objective(p[0], p[1]);
    memo.emplace(key, value);
    return value;
  };

  struct Seed {
    std::array<double, 2> x;
    double value;
  };
  std::vector<Seed> seeds;
  seeds.reserve(kGridAxis.size() * kGridAxis.size());
  for (double sigma : kGridAxis)
    for (double xi : kGridAxis) seeds.push_back({{sigma, xi}, eval({sigma, xi})});
  std::stable_sort(seeds.begin(), seeds.end(),
                   [](const Seed& a, const Seed& b) { return a.value < b.value; });

  std::array<double, 2> best_x = seeds.front().x;
  double best_val = seeds.front().value;
  for (int r = 0; r < kRestarts && r < static_cast<int>(seeds.size()); ++r) {
    if (best_val <= kRestartSkip && r > 0) break;
    const auto res = optimize::nelder_mead_2d(
        [&](std::array<double, 2> p) { return eval(p); }, seeds[r].x,
        {0.25 * seeds[r].x[0], 0.25 * seeds[r].x[1]}, {kBoxLo, kBoxLo},
        {kBoxHi, kBoxHi}, 1e-4, 1e-7, kMaxNmEvals);
    if (res.value < best_val) {
      best_val = res.value;
      best_x = res.x;
    }
  }
  CalibrationResult result;
  result.sigma = best_x[0];
  result.xi = best_x[1];
  result.objective = best_val;
  result.evaluations = evals;
  result.converged = best_val <= kCalibrationAccept;
  result.label = label;
  return result;
}

CalibrationResult finish(CalibrationResult result) {
  if (result.objective > kCalibrationReject)
    throw CalibrationError("calibration failed to converge for '" + result.label +
                               "' (best objective " + std::to_string(result.objective) + ")",
                           result);
  return result;
}

}  // namespace

CalibrationResult calibrate_single(const CalibrationTarget& target,
                                   const PricingOracleFn& oracle) {
  target.validate(/*sector=*/true);
  const auto objective = [&](double sigma, double xi) {
    return max_rel_error(oracle(sigma, xi), target.spreads);
  };
  return finish(minimize_2d(objective, target.label));
}

SectorCalibrationResult calibrate_sector(
    const std::map<BroadRating, CalibrationTarget>& targets,
    const McOracleConfig& cfg, bool shared_xi) {
  if (targets.empty())
    throw std::invalid_argument("calibrate_sector: no rating targets");
  for (const auto& [broad, target] : targets) target.validate(/*sector=*/true);

  std::map<BroadRating, McPricingOracle> oracles;
  for (const auto& [broad, target] : targets)
    oracles.emplace(broad, McPricingOracle(target.lambda,
                                           {kSectorTenors.begin(), kSectorTenors.end()},
                                           cfg));

  SectorCalibrationResult result;
  if (!shared_xi || targets.size() == 1) {
    double worst = 0.0;
    for (const auto& [broad, target] : targets) {
      const auto& oracle = oracles.at(broad);
      auto single = calibrate_single(
          target, [&](double s, double x) { return oracle(s, x); });
      worst = std::max(worst, single.objective);
      result.xi = single.xi;
      result.by_rating.emplace(broad, std::move(single));
    }
    result.objective = worst;
    return result;
  }

  // Inner: best sigma for one rating at fixed xi. Warm bracket shrinks
  // around the previous optimum as the outer xi search narrows.
  std::map<BroadRating, double> sigma_hint;
  const auto rating_best = [&](BroadRating broad, double xi, int& evals) {
    const auto& oracle = oracles.at(broad);
    const auto& target = targets.at(broad);
    const auto f = [&](double sigma) {
      ++evals;
      return max_rel_error(oracle(sigma, xi), target.spreads);
    };
    double lo = 0.02, hi = 1.2;
    if (const auto it = sigma_hint.find(broad); it != sigma_hint.end()) {
      lo = std::max(0.02, it->second * 0.55);
      hi = std::min(kBoxHi, it->second * 1.8);
    }
    const auto res = optimize::golden_minimize(f, lo, hi, 2e-4, 60);
    sigma_hint[broad] = res.x;
    return res;
  };

  int total_evals = 0;
  const auto sector_objective = [&](double xi) {
    double worst = 0.0;
    for (const auto& [broad, target] : targets)
      worst = std::max(worst, rating_best(broad, xi, total_evals).value);
    return worst;
  };

  // Coarse xi grid, then golden refinement in the bracketing cell.
  constexpr std::array<double, 7> kXiGrid = {0.06, 0.10, 0.17, 0.28, 0.47, 0.80, 1.35};
  double best_xi = kXiGrid[0];
  double best_val = sector_objective(kXiGrid[0]);
  for (std::size_t i = 1; i < kXiGrid.size(); ++i) {
    const double value = sector_objective(kXiGrid[i]);
    if (value < best_val) {
      best_val = value;
      best_xi = kXiGrid[i];
    }
  }
  const auto it = std::find(kXiGrid.begin(), kXiGrid.end(), best_xi);
  const double lo = it == kXiGrid.begin() ? 0.02 : *(it - 1);
  const double hi = it + 1 == kXiGrid.end() ? kBoxHi : *(it + 1);
  const auto refined = optimize::golden_minimize(sector_objective, lo, hi, 2e-4, 60);

  result.xi = refined.x;
  result.objective = refined.value;
  for (const auto& [broad, target] : targets) {
    CalibrationResult single;
    single.label = target.label;
    single.xi = refined.x;
    const auto best = rating_best(broad, refined.x, total_evals);
    single.sigma = best.x;
    single.objective = best.value;
    single.evaluations = total_evals;
    single.converged = best.value <= kCalibrationAccept;
    if (best.value > kCalibrationReject)
      throw CalibrationError("calibrate_sector: rating " + to_string(broad) +
                                 " failed to converge (objective " +
                                 std::to_string(best.value) + ")",
                             single);
    result.by_rating.emplace(broad, std::move(single));
  }
  // If the shared-xi fit cannot reach the acceptance band, the constraint
  // is binding on this data.
  result.shared_xi_binding = result.objective > kCalibrationAccept;
  return result;
}

CalibrationResult calibrate_country(std::span<const std::pair<double, double>> quotes,
                                    const RatingGrade& sovereign_grade,
                                    const RatingSchemes& schemes,
                                    const McOracleConfig& cfg,
                                    std::optional<double> lambda_override) {
  std::vector<double> tenors, spreads;
  for (const auto& [t, s] : quotes) {
    tenors.push_back(t);
    spreads.push_back(s);
  }
  CalibrationTarget target;
  target.tenors = tenors;
  target.spreads = spreads;
  target.lambda = lambda_override.value_or(schemes.lambda_of(sovereign_grade));
  target.label = "country/" + to_string(sovereign_grade);
  target.validate(/*sector=*/false);

  std::vector<double> distinct = tenors;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) {
    CalibrationResult best;
    best.label = target.label;
    throw CalibrationError("calibrate_country: underdetermined, need quotes at two "
                           "distinct tenors",
                           best);
  }

  if (target.lambda == 0.0) {
    CalibrationResult best;
    best.label = target.label;
    throw CalibrationError(
        "calibrate_country: xi unidentifiable with lambda = 0 (no jump leg to fit)",
        best);
  }

  const McPricingOracle oracle(target.lambda, tenors, cfg);
  const auto objective = [&](double sigma, double xi) {
    return rms_rel_error(oracle(sigma, xi), target.spreads);
  };
  return finish(minimize_2d(objective, target.label));
}

}  // namespace emcredit
