// emcredit command-line tool.
//
// Subcommands:
//   fit-dm             fit the rating-indexed sector parameterisation to DM quotes
//   calibrate-country  recover (sigma, xi) from a sovereign spread curve
//   calibrate-sector   recover per-rating sigma and the shared xi from fitted curves
//   price              emit EM corporate, standalone and country spread curves
//   validate           run the engine's invariant self-checks
//
// Exit codes: 0 success, 2 schema/validation error, 3 non-convergence,
// 4 internal error.

#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "emcredit/basket.hpp"
#include "emcredit/calibration.hpp"
#include "emcredit/curve_fit.hpp"
#include "emcredit/io.hpp"
#include "emcredit/validation.hpp"
#include "emcredit/version.hpp"

namespace {

using namespace emcredit;

constexpr int kExitOk = 0;
constexpr int kExitSchema = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitInternal = 4;

struct CommonArgs {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<int> threads;

  Config load() const {
    Config cfg = config_path.empty() ? Config{} : Config::from_file(config_path);
    if (seed) cfg.seed = *seed;
    if (paths) cfg.n_paths = *paths;
    if (threads) cfg.threads = *threads;
    return cfg;
  }

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key=value configuration file");
    cmd->add_option("--seed", seed, "override the RNG seed");
    cmd->add_option("--paths", paths, "override the Monte Carlo path count");
    cmd->add_option("--threads", threads, "worker count (0 = hardware)");
  }
};

std::vector<double> parse_tenors(const std::string& spec) {
  std::vector<double> tenors;
  const auto colon = spec.find(':');
  if (colon != std::string::npos) {
    const auto colon2 = spec.find(':', colon + 1);
    if (colon2 == std::string::npos)
      throw SchemaError("--tenors range form is start:stop:step");
    const double start = std::stod(spec.substr(0, colon));
    const double stop = std::stod(spec.substr(colon + 1, colon2 - colon - 1));
    const double step = std::stod(spec.substr(colon2 + 1));
    if (!(start > 0.0 && step > 0.0 && stop >= start))
      throw SchemaError("--tenors range must satisfy 0 < start <= stop, step > 0");
    for (double t = start; t <= stop + 1e-9; t += step) tenors.push_back(t);
    return tenors;
  }
  std::size_t pos = 0;
  while (pos < spec.size()) {
    const auto comma = spec.find(',', pos);
    const std::string token = spec.substr(pos, comma == std::string::npos ? spec.size() - pos
                                                                          : comma - pos);
    tenors.push_back(std::stod(token));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (tenors.empty()) throw SchemaError("--tenors: no tenors given");
  return tenors;
}

McOracleConfig oracle_config(const Config& cfg) {
  McOracleConfig oracle;
  oracle.seed = cfg.seed;
  oracle.n_paths = cfg.n_paths;
  oracle.dt = cfg.dt;
  oracle.n_threads = cfg.threads;
  oracle.discount_rate = cfg.discount_rate;
  oracle.recovery = cfg.recovery;
  return oracle;
}

int cmd_fit_dm(const CommonArgs& common, const std::string& quotes_path,
               const std::string& out_path, const std::string& residuals_path) {
  const Config cfg = common.load();
  const auto rows = read_quote_csv(quotes_path);

  std::set<std::string> sectors;
  for (const auto& row : rows) sectors.insert(row.sector);
  if (sectors.size() != 1)
    throw SchemaError(quotes_path + ": fit-dm fits one sector at a time, found " +
                      std::to_string(sectors.size()));

  std::vector<Quote> quotes;
  quotes.reserve(rows.size());
  for (const auto& row : rows)
    quotes.push_back({row.tenor_years, row.spread_bp / 1e4, row.grade, 1.0});

  const SectorFit fit = fit_sector(quotes);
  for (const auto& diag : fit.diagnostics) std::cerr << "fit-dm: " << diag << '\n';

  std::vector<SectorCurveRow> out_rows;
  for (const auto& [broad, ab] : fit.curve.ab)
    out_rows.push_back({broad, ab.first, ab.second, fit.curve.theta});
  write_sector_curve_csv(out_path, out_rows);

  if (!residuals_path.empty()) {
    std::vector<ResidualRow> residuals;
    for (const auto& row : rows) {
      double model;
      try {
        model = interpolate_grade_spread(fit.curve, row.grade, row.tenor_years);
      } catch (const std::range_error&) {
        continue;  // quote was dropped with a diagnostic above
      }
      residuals.push_back({row.name, row.grade, row.tenor_years, row.spread_bp,
                           model * 1e4, (model * 1e4 - row.spread_bp) / row.spread_bp});
    }
    write_residual_csv(residuals_path, residuals);
  }
  RunManifest::make("fit-dm", cfg, {quotes_path}).write(out_path + ".manifest");
  return kExitOk;
}

int cmd_calibrate_country(const CommonArgs& common, const std::string& quotes_path,
                          const std::string& out_path) {
  const Config cfg = common.load();
  const auto rows = read_country_csv(quotes_path);

  // group rows by country; each country's grade must be consistent
  std::map<std::string, std::pair<RatingGrade, std::vector<std::pair<double, double>>>> data;
  for (const auto& row : rows) {
    auto [it, inserted] = data.try_emplace(row.country, row.grade,
                                           std::vector<std::pair<double, double>>{});
    if (!inserted && !(it->second.first == row.grade))
      throw SchemaError(quotes_path + ": inconsistent grade for country '" + row.country + "'");
    it->second.second.emplace_back(row.tenor_years, row.spread_bp / 1e4);
  }

  const RatingSchemes schemes = cfg.schemes();
  std::vector<ParameterRow> params;
  for (const auto& [country, entry] : data) {
    const auto& [grade, quotes] = entry;
    const CalibrationResult result =
        calibrate_country(quotes, grade, schemes, oracle_config(cfg));
    std::cerr << "calibrate-country: " << country << " sigma=" << format_double(result.sigma)
              << " xi=" << format_double(result.xi)
              << " objective=" << format_double(result.objective)
              << (result.converged ? "" : " (objective above acceptance band)") << '\n';
    params.push_back({country, grade, result.sigma, result.xi, schemes.lambda_of(grade)});
  }
  write_parameter_csv(out_path, params);
  RunManifest::make("calibrate-country", cfg, {quotes_path}).write(out_path + ".manifest");
  return kExitOk;
}

int cmd_calibrate_sector(const CommonArgs& common, const std::string& curves_path,
                         const std::string& out_path, const std::string& label) {
  const Config cfg = common.load();
  const auto rows = read_sector_curve_csv(curves_path);
  const RatingSchemes schemes = cfg.schemes();

  std::map<BroadRating, CalibrationTarget> targets;
  for (const auto& row : rows) {
    CalibrationTarget target;
    target.tenors = {kSectorTenors.begin(), kSectorTenors.end()};
    for (double tenor : target.tenors)
      target.spreads.push_back(eval_parametric(row.a, row.b, row.theta, tenor));
    target.lambda = schemes.lambda_of(RatingGrade{row.grade, RatingModifier::Flat});
    target.label = label + "/" + to_string(row.grade);
    if (!targets.emplace(row.grade, std::move(target)).second)
      throw SchemaError(curves_path + ": duplicate grade " + to_string(row.grade));
  }

  const SectorCalibrationResult result = calibrate_sector(targets, oracle_config(cfg));
  std::cerr << "calibrate-sector: shared xi=" << format_double(result.xi) << " objective="
            << format_double(result.objective)
            << (result.shared_xi_binding ? " (shared-xi constraint binding)" : "") << '\n';

  std::vector<ParameterRow> params;
  for (const auto& [broad, single] : result.by_rating)
    params.push_back({label, RatingGrade{broad, RatingModifier::Flat}, single.sigma,
                      single.xi, targets.at(broad).lambda});
  write_parameter_csv(out_path, params);
  RunManifest::make("calibrate-sector", cfg, {curves_path}).write(out_path + ".manifest");
  return kExitOk;
}

int cmd_price(const CommonArgs& common, const std::string& params_path,
              const std::string& country_label, const std::string& out_path,
              const std::string& tenor_spec) {
  const Config cfg = common.load();
  const auto rows = read_parameter_csv(params_path);

  std::optional<ParameterRow> country;
  std::map<RatingGrade, ProcessParams> sector;
  for (const auto& row : rows) {
    if (row.label == country_label) {
      if (country) throw SchemaError(params_path + ": duplicate country row '" + country_label + "'");
      country = row;
    } else {
      if (!sector.emplace(row.grade, ProcessParams(row.sigma, row.lambda, row.xi)).second)
        throw SchemaError(params_path + ": duplicate sector grade " + to_string(row.grade));
    }
  }
  if (!country)
    throw SchemaError(params_path + ": no row labelled '" + country_label + "'");
  if (sector.empty()) throw SchemaError(params_path + ": no sector parameter rows");

  const std::vector<double> tenors = parse_tenors(tenor_spec);
  PathConfig path_cfg;
  path_cfg.dt = cfg.dt;
  const double n_steps = std::ceil(tenors.back() / cfg.dt - 1e-9);
  path_cfg.horizon = n_steps * cfg.dt;
  path_cfg.n_paths = cfg.n_paths;
  path_cfg.seed = cfg.seed;
  path_cfg.record_terminal = false;
  path_cfg.n_threads = cfg.threads;

  const ProcessParams country_params(country->sigma, country->lambda, country->xi);
  const EmCurveResult result = em_corporate_curve(
      country_params, sector, cfg.schemes(), cfg.rho, path_cfg, tenors,
      DiscountCurve::flat(cfg.discount_rate), RecoveryAssumption{cfg.recovery},
      cfg.basket_options());

  std::vector<CurveRow> out_rows;
  const auto emit = [&](const std::string& id, const RatingGrade& grade,
                        const SpreadCurve& curve) {
    for (std::size_t i = 0; i < curve.tenors.size(); ++i)
      out_rows.push_back({id, grade, curve.tenors[i], curve.spread[i] * 1e4,
                          curve.se[i] * 1e4});
  };
  for (const auto& [grade, family] : result.by_rating) {
    emit("em", grade, family.em);
    emit("standalone", grade, family.standalone);
  }
  emit("country", country->grade, result.country);
  write_curve_csv(out_path, out_rows);
  RunManifest::make("price", cfg, {params_path}).write(out_path + ".manifest");
  return kExitOk;
}

int cmd_validate(const CommonArgs& common, const std::string& out_path,
                 double inject_drift) {
  const Config cfg = common.load();
  ValidationConfig vcfg;
  vcfg.seed = cfg.seed;
  vcfg.n_paths = cfg.n_paths;
  vcfg.dt = cfg.dt;
  vcfg.threads = cfg.threads;
  vcfg.drift_offset = inject_drift;

  const auto report = run_validation(vcfg);
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path, std::ios::binary);
    if (!file) throw SchemaError(out_path + ": cannot open for writing");
    out = &file;
  }
  (*out) << "check,status,measured,threshold,note\n";
  for (const auto& row : report)
    (*out) << row.name << ',' << row.status << ',' << format_double(row.measured) << ','
           << format_double(row.threshold) << ',' << row.note << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EM corporate credit basket pricing and calibration engine"};
  app.set_version_flag("--version", std::string("emcredit ") + kVersion);
  app.require_subcommand(1);

  CommonArgs common;

  auto* fit = app.add_subcommand("fit-dm", "fit sector spread curves to DM quotes");
  std::string fit_quotes, fit_out, fit_residuals;
  fit->add_option("--quotes", fit_quotes, "quotes CSV")->required();
  fit->add_option("--out", fit_out, "output sector curve CSV")->required();
  fit->add_option("--residuals", fit_residuals, "residual report CSV");
  common.attach(fit);

  auto* cal_country = app.add_subcommand("calibrate-country", "calibrate country parameters");
  std::string cc_quotes, cc_out;
  cal_country->add_option("--quotes", cc_quotes, "country quotes CSV")->required();
  cal_country->add_option("--out", cc_out, "output parameter CSV")->required();
  common.attach(cal_country);

  auto* cal_sector = app.add_subcommand("calibrate-sector", "calibrate sector parameters");
  std::string cs_curves, cs_out, cs_label = "sector";
  cal_sector->add_option("--curves", cs_curves, "fitted sector curve CSV")->required();
  cal_sector->add_option("--out", cs_out, "output parameter CSV")->required();
  cal_sector->add_option("--label", cs_label, "label for the output rows");
  common.attach(cal_sector);

  auto* price = app.add_subcommand("price", "price EM corporate curves");
  std::string p_params, p_country, p_out, p_tenors = "0.5:10:0.5";
  price->add_option("--params", p_params, "parameter CSV")->required();
  price->add_option("--country", p_country, "label of the country row")->required();
  price->add_option("--out", p_out, "output curve CSV")->required();
  price->add_option("--tenors", p_tenors, "comma list or start:stop:step");
  common.attach(price);

  auto* validate = app.add_subcommand("validate", "run engine self-checks");
  std::string v_out;
  double v_drift = 0.0;
  validate->add_option("--out", v_out, "report CSV (default: stdout)");
  validate->add_option("--inject-drift", v_drift,
                       "testing hook: offset the drift seen by the martingale check");
  common.attach(validate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitSchema;
  }

  try {
    if (fit->parsed()) return cmd_fit_dm(common, fit_quotes, fit_out, fit_residuals);
    if (cal_country->parsed()) return cmd_calibrate_country(common, cc_quotes, cc_out);
    if (cal_sector->parsed()) return cmd_calibrate_sector(common, cs_curves, cs_out, cs_label);
    if (price->parsed()) return cmd_price(common, p_params, p_country, p_out, p_tenors);
    if (validate->parsed()) return cmd_validate(common, v_out, v_drift);
  } catch (const SchemaError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const CalibrationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    const auto& best = e.best();
    std::cerr << "best point: sigma=" << format_double(best.sigma)
              << " xi=" << format_double(best.xi)
              << " objective=" << format_double(best.objective) << '\n';
    return kExitNoConvergence;
  } catch (const CurveFitError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}
