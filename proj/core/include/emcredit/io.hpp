#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "emcredit/basket.hpp"
#include "emcredit/rating.hpp"

namespace emcredit {

// Input-file or config violation; messages carry the file and row number.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat key=value run configuration.
//
// Keys: seed, n_paths, dt, rho, recovery, discount_rate, threads,
//       lstar_a, lstar_c.<grade>, lambda.<grade> (broad grades),
//       extension1, extension1_grades, quasi_sovereign.
struct Config {
  std::uint64_t seed = 42;
  std::size_t n_paths = 100000;
  double dt = 1.0 / 250.0;
  double rho = 0.80;
  double recovery = 0.40;
  double discount_rate = 0.02;
  int threads = 0;
  std::optional<double> lstar_a;
  std::map<BroadRating, double> lstar_c_overrides;  // may be +inf (sentinel)
  std::map<BroadRating, double> lambda_overrides;
  bool extension1 = false;
  std::vector<RatingGrade> extension1_grades;
  bool quasi_sovereign = false;

  static Config from_file(const std::string& path);
  void apply(const std::string& key, const std::string& value);

  RatingSchemes schemes() const;
  BasketOptions basket_options() const;
  // Canonical key=value dump (sorted keys), embedded in manifests.
  std::string serialized() const;
};

// --- CSV schemas -----------------------------------------------------------

struct QuoteRow {
  std::string name, sector, country;
  RatingGrade grade;
  double tenor_years = 0.0;
  double spread_bp = 0.0;
};

struct CountryQuoteRow {
  std::string country;
  RatingGrade grade;
  double tenor_years = 0.0;
  double spread_bp = 0.0;
};

struct ParameterRow {
  std::string label;
  RatingGrade grade;
  double sigma = 0.0, xi = 0.0, lambda = 0.0;
};

struct CurveRow {
  std::string curve_id;
  RatingGrade grade;
  double tenor_years = 0.0;
  double spread_bp = 0.0;
  double stderr_bp = 0.0;
};

struct SectorCurveRow {
  BroadRating grade = BroadRating::A;
  double a = 0.0, b = 0.0, theta = 0.0;
};

struct ResidualRow {
  std::string name;
  RatingGrade grade;
  double tenor_years = 0.0, spread_bp = 0.0, model_bp = 0.0, residual_rel = 0.0;
};

std::vector<QuoteRow> read_quote_csv(const std::string& path);
std::vector<CountryQuoteRow> read_country_csv(const std::string& path);
std::vector<ParameterRow> read_parameter_csv(const std::string& path);
std::vector<CurveRow> read_curve_csv(const std::string& path);
std::vector<SectorCurveRow> read_sector_curve_csv(const std::string& path);

void write_parameter_csv(const std::string& path, const std::vector<ParameterRow>& rows);
void write_curve_csv(const std::string& path, const std::vector<CurveRow>& rows);
void write_sector_curve_csv(const std::string& path,
                            const std::vector<SectorCurveRow>& rows);
void write_residual_csv(const std::string& path, const std::vector<ResidualRow>& rows);

// Shortest exact decimal representation (round-trips through parsing).
std::string format_double(double value);

// FNV-1a 64-bit content digest, hex-encoded.
std::string file_digest(const std::string& path);

// Everything needed to reproduce an output byte-exactly.
struct RunManifest {
  std::string command;
  Config config;
  std::vector<std::pair<std::string, std::string>> inputs;  // (path, digest)
  std::string timestamp;                                    // ISO-8601 UTC

  static RunManifest make(std::string command, const Config& config,
                          const std::vector<std::string>& input_paths);
  void write(const std::string& path) const;
};

}  // namespace emcredit
