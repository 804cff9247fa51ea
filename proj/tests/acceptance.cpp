// Acceptance suite: one pass/fail line per criterion, nonzero exit when
// anything fails. Tolerances are pinned in code next to each check.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "emcredit/basket.hpp"
#include "emcredit/calibration.hpp"
#include "emcredit/curve_fit.hpp"
#include "emcredit/default_curve.hpp"
#include "emcredit/first_passage.hpp"
#include "emcredit/simulate.hpp"

using namespace emcredit;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double elapsed_s(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

// Table of calibrated parameters: per dated sector/country study, the
// country (sigma, xi, lambda) and per-rating sector (sigma, xi).
struct StudyRow {
  const char* name;
  double sigma_c, xi_c, lambda_c;
  // A, BBB, BB, B sigma; shared sector xi; NaN sigma = not quoted
  std::array<double, 4> sigma_a;
  double xi_a;
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<StudyRow> kStudies = {
    {"food-brazil-1", 0.32, 0.25, 0.5, {0.18, 0.16, 0.16, 0.15}, 0.27},
    {"food-brazil-2", 0.25, 0.13, 0.5, {0.16, 0.14, 0.11, 0.14}, 0.25},
    {"mining-peru-1", 0.22, 0.25, 0.2, {0.27, 0.29, 0.38, 0.62}, 0.27},
    {"mining-peru-2", 0.20, 0.17, 0.2, {0.16, 0.14, 0.14, 0.17}, 0.24},
    {"oilgas-russia-1", 0.26, 0.23, 0.5, {0.23, 0.26, 0.33, kNaN}, 0.30},
    {"oilgas-russia-2", 0.18, 0.17, 0.5, {0.16, 0.14, 0.15, kNaN}, 0.25},
    {"banks-turkey-1", 0.23, 0.25, 0.5, {0.17, 0.16, 0.21, kNaN}, 0.27},
    {"banks-turkey-2", 0.25, 0.14, 0.5, {0.15, 0.15, 0.15, kNaN}, 0.23},
    {"realestate-china-1", 0.21, 0.24, 0.125, {0.15, 0.23, 0.23, 0.27}, 0.22},
    {"realestate-china-2", 0.17, 0.20, 0.125, {0.18, 0.18, 0.18, 0.21}, 0.21},
};

constexpr std::array<double, 4> kSectorLambda = {0.125, 0.25, 0.5, 1.0};

constexpr std::size_t kPaths = 100000;
constexpr double kDt = 1.0 / 250.0;
constexpr std::uint64_t kSeed = 20180601;

// ---------------------------------------------------------------------------

void criterion_1_martingale() {
  const double barrier[] = {5.0};  // out of reach; terminal statistics only
  bool all_pass = true;
  double worst_ratio = 0.0;
  double worst_row_time = 0.0;

  for (const auto& row : kStudies) {
    const auto row_start = std::chrono::steady_clock::now();
    std::vector<ProcessParams> sets;
    sets.emplace_back(row.sigma_c, row.lambda_c, row.xi_c);
    for (int k = 0; k < 4; ++k)
      if (!std::isnan(row.sigma_a[k]))
        sets.emplace_back(row.sigma_a[k], kSectorLambda[k], row.xi_a);

    for (const auto& params : sets) {
      for (double horizon : {1.0, 5.0, 10.0}) {
        PathConfig cfg{horizon, kDt, kPaths, kSeed, true, 0};
        const auto rec = simulate_crossings(params, barrier, cfg);
        double sum = 0, sum_sq = 0;
        for (double x : rec.terminal_x) {
          const double v = std::exp(x);
          sum += v;
          sum_sq += v * v;
        }
        const double n = static_cast<double>(kPaths);
        const double mean = sum / n;
        const double se = std::sqrt(std::max(sum_sq / n - mean * mean, 0.0) / n);
        const double ratio = std::abs(mean - 1.0) / (3.0 * se);
        worst_ratio = std::max(worst_ratio, ratio);
        all_pass &= ratio <= 1.0;
      }
    }
    worst_row_time = std::max(worst_row_time, elapsed_s(row_start));
  }
  all_pass &= worst_row_time <= 60.0;
  report(1, "martingale conservation over the calibrated parameter table", all_pass,
         "worst |mean-1|/3SE = " + fmt(worst_ratio) + ", worst row time " +
             fmt(worst_row_time) + " s (limit 60)");
}

void criterion_2_oracle() {
  const ProcessParams params(0.2, 0.0, 0.25);  // mu = -0.02
  const double barrier[] = {1.0};
  PathConfig cfg{25.0, kDt, kPaths, kSeed + 1, false, 0};
  const auto rec = simulate_crossings(params, barrier, cfg);
  std::vector<double> grid;
  for (int y = 1; y <= 25; ++y) grid.push_back(y);
  const auto curve = estimate_default_curve(rec.times(0), grid);

  double worst_excess = -1e9;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double exact = diffusion_first_passage_cdf(0.2, params.mu(), 1.0, grid[i]);
    const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(kPaths));
    const double tol = std::max(3.0 * se, 0.01 * exact);
    worst_excess = std::max(worst_excess, std::abs(curve.p[i] - exact) - tol);
  }
  report(2, "pure-diffusion Monte Carlo agrees with the first-passage law",
         worst_excess <= 0.0,
         "max deviation minus tolerance = " + fmt(worst_excess));
}

void criterion_3_precision() {
  const ProcessParams params(0.32, 0.5, 0.25);
  const double barrier[] = {1.0};
  PathConfig cfg{5.0, kDt, kPaths, kSeed + 2, false, 0};
  const auto rec = simulate_crossings(params, barrier, cfg);
  const double tenor[] = {5.0};
  const auto curve =
      spread_curve(rec.times(0), DiscountCurve::flat(0.02), RecoveryAssumption{}, tenor);
  const double rel = curve.se[0] / curve.spread[0];
  report(3, "100k-path standard error of the 5y spread is within 0.5%", rel <= 0.005,
         "se/spread = " + fmt(rel) + " at spread " + fmt(curve.spread[0] * 1e4) + " bp");
}

struct BasketCurves {
  SpreadCurve standalone, country_leg, mftd, ftd;
};

BasketCurves basket_curves(std::uint64_t seed, std::vector<double> tenors) {
  const ProcessParams corp(0.16, 0.5, 0.27);  // BB sector, first study row
  const ProcessParams ctry(0.32, 0.5, 0.25);
  const double barriers_a[] = {1.0};
  const double barriers_c[] = {1.0, 1.20};  // plain FtD depth and the BB scheme depth
  PathConfig cfg{10.0, kDt, kPaths, seed, false, 0};
  const auto joint = simulate_pair_crossings(corp, ctry, 0.8, barriers_a, barriers_c, cfg);
  const auto disc = DiscountCurve::flat(0.02);
  const RecoveryAssumption rec;
  BasketCurves out;
  out.standalone = spread_curve(joint.corporate.times(0), disc, rec, tenors);
  out.country_leg = spread_curve(joint.country.times(0), disc, rec, tenors);
  out.mftd = spread_curve(basket_default_samples(joint, BasketSpec{1.0, 1.20, 0.8}),
                          disc, rec, tenors);
  out.ftd = spread_curve(basket_default_samples(joint, BasketSpec{1.0, 1.0, 0.8}), disc,
                         rec, tenors);
  return out;
}

void criteria_4_5(const BasketCurves& curves, const std::vector<double>& tenors) {
  bool ftd_floor = true;
  double worst_floor = 1e9;
  for (std::size_t i = 0; i < tenors.size(); ++i) {
    const double max_leg = std::max(curves.standalone.spread[i], curves.country_leg.spread[i]);
    const double se = 3.0 * std::sqrt(curves.ftd.se[i] * curves.ftd.se[i] +
                                      curves.standalone.se[i] * curves.standalone.se[i] +
                                      curves.country_leg.se[i] * curves.country_leg.se[i]);
    worst_floor = std::min(worst_floor, curves.ftd.spread[i] - (max_leg - se));
    ftd_floor &= curves.ftd.spread[i] >= max_leg - se;
  }
  const double sum_gap =
      std::abs(curves.ftd.spread[0] - curves.standalone.spread[0] - curves.country_leg.spread[0]);
  const double sum_se =
      3.0 * std::sqrt(curves.ftd.se[0] * curves.ftd.se[0] +
                      curves.standalone.se[0] * curves.standalone.se[0] +
                      curves.country_leg.se[0] * curves.country_leg.se[0]);
  const bool sum_ok = sum_gap <= sum_se;
  report(4, "FtD floors at the widest constituent; 0.5y FtD is the sum of spreads",
         ftd_floor && sum_ok,
         "floor margin " + fmt(worst_floor) + ", 0.5y |ftd-(a+c)| = " + fmt(sum_gap) +
             " vs 3SE " + fmt(sum_se));

  bool ordered = true;
  for (std::size_t i = 0; i < tenors.size(); ++i)
    ordered &= curves.standalone.spread[i] <= curves.mftd.spread[i] &&
               curves.mftd.spread[i] <= curves.ftd.spread[i];
  report(5, "standalone <= MFtD <= FtD exactly on common paths", ordered,
         ordered ? "pathwise dominance holds at every tenor" : "ordering violated");
}

void criterion_6_limit() {
  const ProcessParams corp(0.16, 0.5, 0.27);
  const ProcessParams ctry(0.32, 0.5, 0.25);
  const double barriers_a[] = {1.0};
  const double barriers_c[] = {1.0};
  PathConfig cfg{10.0, kDt, 20000, kSeed + 3, false, 0};
  const auto joint = simulate_pair_crossings(corp, ctry, 0.8, barriers_a, barriers_c, cfg);
  const auto tau = basket_default_samples(joint, BasketSpec{1.0, kNever, 0.8});
  const auto corp_times = joint.corporate.times(0);
  bool identical = std::equal(tau.begin(), tau.end(), corp_times.begin());

  const std::vector<double> tenors = {0.5, 1, 2, 5, 10};
  const auto disc = DiscountCurve::flat(0.02);
  const auto s_basket = spread_curve(tau, disc, RecoveryAssumption{}, tenors);
  const auto s_alone = spread_curve(corp_times, disc, RecoveryAssumption{}, tenors);
  identical &= s_basket.spread == s_alone.spread && s_basket.se == s_alone.se;
  report(6, "country-barrier sentinel reproduces standalone spreads bit-exactly",
         identical, identical ? "default times and curves identical" : "mismatch");
}

void criterion_7_calibration() {
  const auto start = std::chrono::steady_clock::now();
  const McOracleConfig cfg;  // pinned defaults: 16384 paths, dt = 1/100, seed 12345
  const McPricingOracle oracle(0.5, {2.0, 5.0, 10.0}, cfg);

  bool all_ok = true;
  double worst_sigma = 0.0, worst_xi = 0.0;
  for (double sigma : {0.15, 0.25, 0.4, 0.6}) {
    for (double xi : {0.15, 0.25, 0.35, 0.5}) {
      CalibrationTarget target;
      target.tenors = {2.0, 5.0, 10.0};
      target.spreads = oracle(sigma, xi);
      target.lambda = 0.5;
      target.label = "cell";
      try {
        const auto result = calibrate_single(
            target, [&](double s, double x) { return oracle(s, x); });
        const double sigma_err = std::abs(result.sigma - sigma) / sigma;
        const double xi_err = std::abs(result.xi - xi) / xi;
        worst_sigma = std::max(worst_sigma, sigma_err);
        worst_xi = std::max(worst_xi, xi_err);
        all_ok &= sigma_err <= 0.05 && xi_err <= 0.10;
      } catch (const CalibrationError&) {
        all_ok = false;
      }
    }
  }
  const double secs = elapsed_s(start);
  all_ok &= secs <= 600.0;
  report(7, "16-cell calibration round-trip within (5%, 10%) and 10 minutes", all_ok,
         "worst sigma err " + fmt(worst_sigma) + ", worst xi err " + fmt(worst_xi) +
             ", " + fmt(secs) + " s");
}

void criterion_8_curve_fit() {
  ParametricSpreadCurve truth;
  truth.theta = 0.42;
  truth.ab[BroadRating::A] = {std::log(0.009), std::log(0.005)};
  truth.ab[BroadRating::BBB] = {std::log(0.015), std::log(0.008)};
  truth.ab[BroadRating::BB] = {std::log(0.032), std::log(0.025)};
  truth.ab[BroadRating::B] = {std::log(0.060), std::log(0.055)};
  std::vector<Quote> quotes;
  for (BroadRating broad : kBroadRatings)
    for (double tenor : {2.0, 5.0, 10.0}) {
      const auto [a, b] = truth.ab[broad];
      quotes.push_back({tenor, eval_parametric(a, b, truth.theta, tenor),
                        RatingGrade{broad, RatingModifier::Flat}, 1.0});
    }
  const auto fit = fit_sector(quotes);
  double worst = 0.0;
  for (double r : fit.residual_rel) worst = std::max(worst, std::abs(r));
  report(8, "sector fit round-trips self-generated quotes to 1e-6", worst <= 1e-6,
         "max relative residual " + fmt(worst));
}

EmCurveResult study_row_curves(const BasketOptions& options, std::uint64_t seed,
                               std::size_t n_paths, const std::vector<double>& tenors) {
  const auto& row = kStudies[0];
  const ProcessParams ctry(row.sigma_c, row.lambda_c, row.xi_c);
  std::map<RatingGrade, ProcessParams> sector;
  const char* names[] = {"A", "BBB", "BB", "B"};
  for (int k = 0; k < 4; ++k)
    sector.emplace(parse_rating(names[k]),
                   ProcessParams(row.sigma_a[k], kSectorLambda[k], row.xi_a));
  PathConfig cfg{10.0, kDt, n_paths, seed, false, 0};
  return em_corporate_curve(ctry, sector, RatingSchemes{}, 0.8, cfg, tenors,
                            DiscountCurve::flat(0.02), RecoveryAssumption{}, options);
}

void criteria_9_10() {
  const std::vector<double> tenors = {0.5, 1, 2, 3, 5, 7, 10};
  const auto base = study_row_curves({}, kSeed + 4, kPaths, tenors);

  const double s5_a = base.by_rating.at(parse_rating("A")).em.spread[4];
  const double s5_bbb = base.by_rating.at(parse_rating("BBB")).em.spread[4];
  const double s5_bb = base.by_rating.at(parse_rating("BB")).em.spread[4];
  const double s5_b = base.by_rating.at(parse_rating("B")).em.spread[4];
  bool ordered = s5_b > s5_bb && s5_bb > s5_bbb && s5_bbb > s5_a;

  bool below_ftd = true;
  for (const auto& [grade, family] : base.by_rating)
    for (std::size_t i = 0; i < tenors.size(); ++i)
      below_ftd &= family.em.spread[i] <= family.ftd.spread[i];

  report(9, "study-row replay orders 5y EM curves B > BB > BBB > A, below plain FtD",
         ordered && below_ftd,
         "5y bp: A " + fmt(s5_a * 1e4) + ", BBB " + fmt(s5_bbb * 1e4) + ", BB " +
             fmt(s5_bb * 1e4) + ", B " + fmt(s5_b * 1e4));

  BasketOptions ext1;
  ext1.extension1 = true;
  ext1.extension1_grades = {parse_rating("BB"), parse_rating("B")};
  const auto widened = study_row_curves(ext1, kSeed + 4, kPaths, tenors);

  bool widened_ok = true;
  for (const char* grade : {"BB", "B"}) {
    const auto& before = base.by_rating.at(parse_rating(grade)).em;
    const auto& after = widened.by_rating.at(parse_rating(grade)).em;
    for (std::size_t i = 0; i < tenors.size(); ++i)
      widened_ok &= after.spread[i] > before.spread[i];
  }
  // unaffected grades reprice identically on the shared scenario
  for (const char* grade : {"A", "BBB"})
    widened_ok &= widened.by_rating.at(parse_rating(grade)).em.spread ==
                  base.by_rating.at(parse_rating(grade)).em.spread;
  report(10, "corporate barrier at 0.85 strictly widens the configured grades",
         widened_ok, widened_ok ? "strict widening at every tenor on common paths"
                                : "widening violated");
}

void criterion_11_determinism() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() /
                       ("emcredit_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const auto file = [&](const char* name) { return (dir / name).string(); };
  {
    std::ofstream params(file("params.csv"));
    params << "label,grade,sigma,xi,lambda\nBrazil,BB,0.32,0.25,0.5\n"
              "Food,BBB,0.16,0.27,0.25\nFood,BB,0.16,0.27,0.5\n";
    std::ofstream config(file("run.cfg"));
    config << "n_paths=20000\nseed=31415\n";
  }
  const std::string base = std::string(EMCREDIT_CLI_PATH) + " price --params " +
                           file("params.csv") + " --country Brazil --config " +
                           file("run.cfg") + " --tenors 1:10:1";
  const auto run = [&](const std::string& extra, const char* out) {
    const std::string cmd = base + " " + extra + " --out " + file(out) + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) && WEXITSTATUS(status) == 0;
  };
  const auto slurp = [&](const char* name) {
    std::ifstream in(file(name), std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), {});
  };
  bool ok = run("--threads 1", "a.csv") && run("--threads 1", "b.csv") &&
            run("--threads 2", "c.csv") && run("--threads 4", "d.csv");
  if (ok) {
    const auto a = slurp("a.csv");
    ok = !a.empty() && a == slurp("b.csv") && a == slurp("c.csv") && a == slurp("d.csv");
  }
  fs::remove_all(dir);
  report(11, "price output is byte-identical across reruns and worker counts", ok,
         ok ? "4 runs, identical bytes" : "outputs differ or runs failed");
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();

  criterion_1_martingale();
  criterion_2_oracle();
  criterion_3_precision();
  {
    const std::vector<double> tenors = {0.5, 1, 2, 3, 5, 7, 10};
    const auto curves = basket_curves(kSeed + 5, tenors);
    criteria_4_5(curves, tenors);
  }
  criterion_6_limit();
  criterion_7_calibration();
  criterion_8_curve_fit();
  criteria_9_10();
  criterion_11_determinism();

  std::printf("%s: %d criterion(s) failed, total %.1f s\n",
              g_failures == 0 ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL", g_failures,
              elapsed_s(start));
  return g_failures == 0 ? 0 : 1;
}
