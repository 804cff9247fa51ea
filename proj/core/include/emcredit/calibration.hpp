#pragma once

#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "emcredit/default_curve.hpp"
#include "emcredit/process.hpp"
#include "emcredit/rating.hpp"

namespace emcredit {

// Spread targets for one entity with lambda held fixed.
struct CalibrationTarget {
  std::vector<double> tenors;   // sector targets use exactly {2, 5, 10}
  std::vector<double> spreads;  // decimal, > 0
  double lambda = 0.0;
  std::string label;

  void validate(bool sector) const;
};

inline constexpr std::array<double, 3> kSectorTenors = {2.0, 5.0, 10.0};

struct CalibrationResult {
  double sigma = 0.0;
  double xi = 0.0;
  double objective = 0.0;  // minimax (sector/single) or RMS (country) relative error
  int evaluations = 0;
  bool converged = false;
  std::string label;
};

// Non-convergence (best objective above the reject threshold) carrying the
// best point found.
class CalibrationError : public std::runtime_error {
 public:
  CalibrationError(const std::string& what, CalibrationResult best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const CalibrationResult& best() const { return best_; }

 private:
  CalibrationResult best_;
};

// Pricing settings used inside calibration loops. The path count and grid
// are deliberately lighter than production pricing: round-trips compare
// model to model under the identical configuration, so the discretisation
// cancels and only the search accuracy matters.
struct McOracleConfig {
  std::uint64_t seed = 12345;
  std::size_t n_paths = 16384;
  double dt = 1.0 / 100.0;
  int n_threads = 0;
  double discount_rate = 0.02;
  double recovery = 0.40;
};

// Deterministic pricing oracle (sigma, xi) -> model spreads at fixed
// tenors. Every evaluation regenerates the identical driver set from the
// counter-based streams, so the objective is an exact function of the
// candidate parameters (common random numbers).
class McPricingOracle {
 public:
  McPricingOracle(double lambda, std::vector<double> tenors, McOracleConfig cfg = {});

  std::vector<double> operator()(double sigma, double xi) const;

  const std::vector<double>& tenors() const { return tenors_; }
  double lambda() const { return lambda_; }

 private:
  double lambda_;
  std::vector<double> tenors_;
  McOracleConfig cfg_;
};

using PricingOracleFn = std::function<std::vector<double>(double, double)>;

inline constexpr double kCalibrationAccept = 0.02;
inline constexpr double kCalibrationReject = 0.10;

// Minimises the worst relative spread error over the target tenors with a
// Nelder-Mead search restarted from the best points of a coarse 5x5 grid
// over the (sigma, xi) box. Throws CalibrationError if the best objective
// exceeds the reject threshold.
CalibrationResult calibrate_single(const CalibrationTarget& target,
                                   const PricingOracleFn& oracle);

struct SectorCalibrationResult {
  std::map<BroadRating, CalibrationResult> by_rating;
  double xi = 0.0;         // shared across ratings when shared_xi
  double objective = 0.0;  // max over ratings of the per-rating minimax error
  bool shared_xi_binding = false;
};

// Shared-xi sector calibration: outer one-dimensional search over xi,
// inner per-rating search over sigma. With shared_xi = false each rating
// falls back to an independent calibrate_single.
SectorCalibrationResult calibrate_sector(
    const std::map<BroadRating, CalibrationTarget>& targets,
    const McOracleConfig& cfg = {}, bool shared_xi = true);

// Country calibration: least squares in relative error over the quoted
// tenors (at least two distinct tenors required). lambda comes from the
// sovereign grade unless overridden.
CalibrationResult calibrate_country(std::span<const std::pair<double, double>> quotes,
                                    const RatingGrade& sovereign_grade,
                                    const RatingSchemes& schemes,
                                    const McOracleConfig& cfg = {},
                                    std::optional<double> lambda_override = {});

}  // namespace emcredit
