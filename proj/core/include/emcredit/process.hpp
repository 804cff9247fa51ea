#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace emcredit {

// Martingale drift for log firm value with diffusion volatility sigma and
// exponential down-jumps of rate lambda, mean xi:
//   mu = -sigma^2/2 + lambda*xi/(1+xi),
// so that e^{X_t} is a martingale under the pricing measure.
double martingale_drift(double sigma, double lambda, double xi);

// Dynamics of one entity's log firm value. mu is always recomputed from
// (sigma, lambda, xi); it cannot be set independently.
class ProcessParams {
 public:
  ProcessParams(double sigma, double lambda, double xi);

  double sigma() const { return sigma_; }
  double lambda() const { return lambda_; }
  double xi() const { return xi_; }
  double mu() const { return mu_; }

  static constexpr double kMaxSigma = 2.0;
  static constexpr double kMaxXi = 2.0;
  static constexpr double kMaxLambda = 4.0;

 private:
  double sigma_, lambda_, xi_, mu_;
};

// Simulation grid and sample-size settings.
struct PathConfig {
  double horizon = 10.0;     // years
  double dt = 1.0 / 250.0;   // diffusion grid step (years)
  std::size_t n_paths = 100000;
  std::uint64_t seed = 0;
  bool record_terminal = true;  // keep terminal X/W and jump counts per path
  int n_threads = 0;            // 0 = hardware concurrency

  // Number of regular grid steps; throws unless horizon is a positive
  // multiple of dt within rounding.
  std::size_t n_steps() const;
  void validate() const;
};

}  // namespace emcredit
