#pragma once

namespace emcredit {

// Standard normal CDF.
double normal_cdf(double x);

// P(min_{s<=t} (mu*s + sigma*W_s) < -L) for sigma > 0, L > 0:
//   Phi((-L - mu t)/(sigma sqrt t)) + e^{-2 mu L / sigma^2} Phi((-L + mu t)/(sigma sqrt t)).
// Validation oracle for the pure-diffusion (lambda = 0) case.
double diffusion_first_passage_cdf(double sigma, double mu, double level, double t);

// Probability that a Brownian bridge over an interval of length dt with
// endpoint values x0, x1 (both strictly above -level) dips below -level.
// Drift-free by the bridge property; equals exp(-2(x0+L)(x1+L)/(sigma^2 dt)).
double bridge_crossing_probability(double x0, double x1, double level,
                                   double sigma, double dt);

}  // namespace emcredit
