#include "emcredit/first_passage.hpp"

#include <cmath>
#include <stdexcept>

#include "emcredit/process.hpp"

namespace emcredit {

double martingale_drift(double sigma, double lambda, double xi) {
  if (sigma < 0.0 || lambda < 0.0)
    throw std::domain_error("martingale_drift: sigma and lambda must be >= 0");
  if (lambda > 0.0 && xi <= 0.0)
    throw std::domain_error("martingale_drift: xi must be > 0 when lambda > 0");
  const double jump_term = lambda > 0.0 ? lambda * xi / (1.0 + xi) : 0.0;
  return -0.5 * sigma * sigma + jump_term;
}

ProcessParams::ProcessParams(double sigma, double lambda, double xi)
    : sigma_(sigma), lambda_(lambda), xi_(xi) {
  if (!(sigma > 0.0 && sigma <= kMaxSigma))
    throw std::invalid_argument("ProcessParams: sigma must lie in (0, 2]");
  if (!(xi > 0.0 && xi <= kMaxXi))
    throw std::invalid_argument("ProcessParams: xi must lie in (0, 2]");
  if (!(lambda >= 0.0 && lambda <= kMaxLambda))
    throw std::invalid_argument("ProcessParams: lambda must lie in [0, 4]");
  mu_ = martingale_drift(sigma_, lambda_, xi_);
}

std::size_t PathConfig::n_steps() const {
  if (!(dt > 0.0)) throw std::invalid_argument("PathConfig: dt must be > 0");
  const double steps = horizon / dt;
  const auto rounded = static_cast<std::size_t>(std::llround(steps));
  if (rounded == 0 || std::abs(steps - static_cast<double>(rounded)) > 1e-6)
    throw std::invalid_argument("PathConfig: horizon must be a positive multiple of dt");
  return rounded;
}

void PathConfig::validate() const {
  (void)n_steps();
  if (n_paths < 1) throw std::invalid_argument("PathConfig: n_paths must be >= 1");
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865476); }

double diffusion_first_passage_cdf(double sigma, double mu, double level, double t) {
  if (!(sigma > 0.0)) throw std::domain_error("diffusion_first_passage_cdf: sigma must be > 0");
  if (!(level > 0.0)) throw std::domain_error("diffusion_first_passage_cdf: level must be > 0");
  if (t < 0.0) throw std::domain_error("diffusion_first_passage_cdf: t must be >= 0");
  if (t == 0.0) return 0.0;
  const double denom = sigma * std::sqrt(t);
  return normal_cdf((-level - mu * t) / denom) +
         std::exp(-2.0 * mu * level / (sigma * sigma)) *
             normal_cdf((-level + mu * t) / denom);
}

double bridge_crossing_probability(double x0, double x1, double level,
                                   double sigma, double dt) {
  const double a = x0 + level;
  const double b = x1 + level;
  if (a <= 0.0 || b <= 0.0) return 1.0;
  return std::exp(-2.0 * a * b / (sigma * sigma * dt));
}

}  // namespace emcredit
