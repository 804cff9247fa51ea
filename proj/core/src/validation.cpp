#include "emcredit/validation.hpp"

#include <algorithm>
#include <cmath>

#include "emcredit/basket.hpp"
#include "emcredit/calibration.hpp"
#include "emcredit/curve_fit.hpp"
#include "emcredit/default_curve.hpp"
#include "emcredit/first_passage.hpp"
#include "emcredit/simulate.hpp"

namespace emcredit {
namespace {

ValidationCheck check(const std::string& name, double measured, double threshold,
                      const std::string& note = "") {
  return {name, measured <= threshold ? "pass" : "fail", measured, threshold, note};
}

// Sample mean and standard error of e^{X_T + offset*T}; an offset emulates
// a drift that misses the martingale condition by that amount.
std::pair<double, double> exp_moment(std::span<const double> terminal_x, double horizon,
                                     double offset) {
  double sum = 0.0, sum_sq = 0.0;
  for (double x : terminal_x) {
    const double v = std::exp(x + offset * horizon);
    sum += v;
    sum_sq += v * v;
  }
  const double n = static_cast<double>(terminal_x.size());
  const double mean = sum / n;
  const double var = std::max(sum_sq / n - mean * mean, 0.0);
  return {mean, std::sqrt(var / n)};
}

}  // namespace

std::vector<ValidationCheck> run_validation(const ValidationConfig& vcfg) {
  std::vector<ValidationCheck> report;
  const DiscountCurve disc = DiscountCurve::flat(0.02);
  const RecoveryAssumption rec;

  // Martingale conservation at T in {1, 5, 10}.
  {
    const ProcessParams params(0.32, 0.5, 0.25);
    const double barrier[] = {1.0};
    for (double horizon : {1.0, 5.0, 10.0}) {
      PathConfig cfg{horizon, vcfg.dt, vcfg.n_paths, vcfg.seed, true, vcfg.threads};
      const auto record = simulate_crossings(params, barrier, cfg);
      const auto [mean, se] = exp_moment(record.terminal_x, horizon, vcfg.drift_offset);
      report.push_back(check("martingale_T" + std::to_string(static_cast<int>(horizon)),
                             std::abs(mean - 1.0), 3.0 * se));
    }
  }

  // Pathwise barrier monotonicity: deeper barriers never cross earlier.
  {
    const ProcessParams params(0.30, 1.0, 0.4);
    const double barriers[] = {0.85, 1.0, 1.3};
    PathConfig cfg{10.0, vcfg.dt, vcfg.n_paths, vcfg.seed + 1, false, vcfg.threads};
    const auto record = simulate_crossings(params, barriers, cfg);
    std::size_t violations = 0;
    for (std::size_t p = 0; p < record.n_paths; ++p)
      for (std::size_t b = 0; b + 1 < record.barriers.size(); ++b)
        if (record.times(b)[p] > record.times(b + 1)[p]) ++violations;
    report.push_back(check("barrier_monotonicity", static_cast<double>(violations), 0.0));
  }

  // lambda = 0 oracle agreement: MC default curve vs closed form.
  {
    const ProcessParams params(0.2, 0.0, 0.25);
    const double barrier[] = {1.0};
    PathConfig cfg{10.0, vcfg.dt, vcfg.n_paths, vcfg.seed + 2, false, vcfg.threads};
    const auto record = simulate_crossings(params, barrier, cfg);
    std::vector<double> grid;
    for (int y = 1; y <= 10; ++y) grid.push_back(y);
    const auto curve = estimate_default_curve(record.times(0), grid);
    double worst_excess = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double exact = diffusion_first_passage_cdf(params.sigma(), params.mu(), 1.0, grid[i]);
      const double se_null =
          std::sqrt(exact * (1.0 - exact) / static_cast<double>(vcfg.n_paths));
      const double tol = std::max(3.0 * se_null, 0.01 * exact);
      worst_excess = std::max(worst_excess, std::abs(curve.p[i] - exact) - tol);
    }
    report.push_back(check("diffusion_oracle_agreement", worst_excess, 0.0,
                           "max |p_mc - p_exact| minus max(3se, 1% of p)"));
  }

  // Jump frequency: one jump every four years on average for a BBB name.
  {
    const ProcessParams params(0.2, 0.25, 0.3);
    const double barrier[] = {5.0};  // effectively never hit; jumps still counted
    PathConfig cfg{10.0, vcfg.dt, vcfg.n_paths, vcfg.seed + 3, true, vcfg.threads};
    const auto record = simulate_crossings(params, barrier, cfg);
    double total = 0.0;
    for (auto c : record.jump_count) total += c;
    const double rate = total / (10.0 * static_cast<double>(vcfg.n_paths));
    const double se = std::sqrt(params.lambda() / (10.0 * static_cast<double>(vcfg.n_paths)));
    report.push_back(check("jump_frequency", std::abs(rate - params.lambda()), 3.0 * se));
  }

  // Determinism: same seed twice, and worker counts 1 vs 4.
  {
    const ProcessParams params(0.25, 0.5, 0.25);
    const double barriers[] = {1.0, 1.35};
    PathConfig cfg{5.0, vcfg.dt, std::min<std::size_t>(vcfg.n_paths, 20000), vcfg.seed + 4,
                   true, 1};
    const auto first = simulate_crossings(params, barriers, cfg);
    const auto second = simulate_crossings(params, barriers, cfg);
    cfg.n_threads = 4;
    const auto parallel = simulate_crossings(params, barriers, cfg);
    const bool same = first.first_passage == second.first_passage &&
                      first.terminal_x == second.terminal_x &&
                      first.first_passage == parallel.first_passage &&
                      first.terminal_x == parallel.terminal_x;
    report.push_back(check("determinism", same ? 0.0 : 1.0, 0.0,
                           "bit-identical records across reruns and worker counts"));
  }

  // Basket invariants on common paths: sentinel limit, dominance ordering.
  {
    const ProcessParams corp(0.16, 0.5, 0.27);
    const ProcessParams ctry(0.32, 0.5, 0.25);
    const double barriers_a[] = {1.0};
    const double barriers_c[] = {1.0, 1.2};
    PathConfig cfg{10.0, vcfg.dt, std::min<std::size_t>(vcfg.n_paths, 20000), vcfg.seed + 5,
                   false, vcfg.threads};
    const auto joint = simulate_pair_crossings(corp, ctry, 0.8, barriers_a, barriers_c, cfg);
    const auto tau_standalone = joint.corporate.times(0);
    const auto tau_mftd = basket_default_samples(joint, BasketSpec{1.0, 1.2, 0.8});
    const auto tau_ftd = basket_default_samples(joint, BasketSpec{1.0, 1.0, 0.8});
    const auto tau_sentinel = basket_default_samples(joint, BasketSpec{1.0, kNever, 0.8});
    std::size_t violations = 0;
    for (std::size_t p = 0; p < cfg.n_paths; ++p) {
      if (!(tau_ftd[p] <= tau_mftd[p] && tau_mftd[p] <= tau_standalone[p])) ++violations;
      if (tau_sentinel[p] != tau_standalone[p]) ++violations;
    }
    report.push_back(check("basket_pathwise_dominance", static_cast<double>(violations), 0.0));
  }

  // Curve-fit round-trip on self-generated quotes.
  {
    ParametricSpreadCurve truth;
    truth.theta = 0.35;
    truth.ab[BroadRating::A] = {std::log(0.008), std::log(0.004)};
    truth.ab[BroadRating::BBB] = {std::log(0.014), std::log(0.007)};
    truth.ab[BroadRating::BB] = {std::log(0.030), std::log(0.020)};
    truth.ab[BroadRating::B] = {std::log(0.055), std::log(0.050)};
    std::vector<Quote> quotes;
    for (const BroadRating broad : kBroadRatings)
      for (double tenor : {2.0, 5.0, 10.0}) {
        const auto [a, b] = truth.ab[broad];
        quotes.push_back({tenor, eval_parametric(a, b, truth.theta, tenor),
                          RatingGrade{broad, RatingModifier::Flat}, 1.0});
      }
    const auto fit = fit_sector(quotes);
    double worst = 0.0;
    for (double r : fit.residual_rel) worst = std::max(worst, std::abs(r));
    report.push_back(check("curve_fit_round_trip", worst, 1e-6));
  }

  // Monte Carlo precision claim; needs the full path count to be meaningful.
  {
    if (vcfg.n_paths >= 100000) {
      const ProcessParams ctry(0.32, 0.5, 0.25);
      const double barrier[] = {1.0};
      PathConfig cfg{5.0, vcfg.dt, vcfg.n_paths, vcfg.seed + 6, false, vcfg.threads};
      const auto record = simulate_crossings(ctry, barrier, cfg);
      const double tenor[] = {5.0};
      const auto curve = spread_curve(record.times(0), disc, rec, tenor);
      report.push_back(check("mc_precision_5y", curve.se[0] / curve.spread[0], 0.005,
                             "stderr as a fraction of the 5y spread"));
    } else {
      report.push_back({"mc_precision_5y", "skip", 0.0, 0.005,
                        "requires n_paths >= 100000"});
    }
  }

  return report;
}

}  // namespace emcredit
