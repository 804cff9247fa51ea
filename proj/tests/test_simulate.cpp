#include <doctest.h>

#include <cmath>

#include "emcredit/first_passage.hpp"
#include "emcredit/simulate.hpp"

using namespace emcredit;

namespace {

double crossed_fraction(std::span<const double> times, double by = 1e300) {
  std::size_t count = 0;
  for (double t : times) count += t <= by;
  return static_cast<double>(count) / static_cast<double>(times.size());
}

double sample_corr(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  const double cov = sxy / n - sx / n * sy / n;
  const double vx = sxx / n - sx / n * sx / n;
  const double vy = syy / n - sy / n * sy / n;
  return cov / std::sqrt(vx * vy);
}

}  // namespace

TEST_CASE("tiny volatility cannot reach the barrier") {
  const ProcessParams params(0.01, 0.0, 0.25);
  const double barriers[] = {1.0};
  PathConfig cfg{5.0, 1.0 / 250.0, 20000, 11, false, 0};
  const auto rec = simulate_crossings(params, barriers, cfg);
  CHECK(crossed_fraction(rec.times(0)) == 0.0);
}

TEST_CASE("pure diffusion crossing fraction matches the closed form") {
  const ProcessParams params(0.2, 0.0, 0.25);  // mu = -0.02
  CHECK(params.mu() == doctest::Approx(-0.02));
  const double barriers[] = {1.0};
  PathConfig cfg{25.0, 1.0 / 250.0, 20000, 17, false, 0};
  const auto rec = simulate_crossings(params, barriers, cfg);

  const double exact = diffusion_first_passage_cdf(0.2, params.mu(), 1.0, 25.0);
  const double p_hat = crossed_fraction(rec.times(0));
  const double se = std::sqrt(exact * (1.0 - exact) / static_cast<double>(cfg.n_paths));
  CHECK(std::abs(p_hat - exact) <= std::max(3.0 * se, 0.01 * exact));
}

TEST_CASE("deterministic: reruns and worker counts give identical records") {
  const ProcessParams params(0.25, 0.5, 0.3);
  const double barriers[] = {0.9, 1.0, 1.35};
  PathConfig cfg{5.0, 1.0 / 250.0, 6000, 123, true, 1};
  const auto a = simulate_crossings(params, barriers, cfg);
  const auto b = simulate_crossings(params, barriers, cfg);
  cfg.n_threads = 3;
  const auto c = simulate_crossings(params, barriers, cfg);

  CHECK(a.first_passage == b.first_passage);
  CHECK(a.terminal_x == b.terminal_x);
  CHECK(a.first_passage == c.first_passage);
  CHECK(a.terminal_x == c.terminal_x);
  CHECK(a.terminal_w == c.terminal_w);
  CHECK(a.jump_count == c.jump_count);
}

TEST_CASE("deeper barriers never cross earlier on any path") {
  const ProcessParams params(0.3, 1.0, 0.5);
  const double barriers[] = {0.5, 0.85, 1.0, 1.3, 2.0};
  PathConfig cfg{10.0, 1.0 / 250.0, 10000, 900, false, 0};
  const auto rec = simulate_crossings(params, barriers, cfg);
  for (std::size_t p = 0; p < cfg.n_paths; ++p)
    for (std::size_t b = 0; b + 1 < rec.barriers.size(); ++b)
      REQUIRE(rec.times(b)[p] <= rec.times(b + 1)[p]);
}

TEST_CASE("e^X stays a martingale under the simulated dynamics") {
  const ProcessParams params(0.32, 0.5, 0.25);
  const double barriers[] = {1.0};
  for (double horizon : {1.0, 5.0}) {
    PathConfig cfg{horizon, 1.0 / 250.0, 20000, 31, true, 0};
    const auto rec = simulate_crossings(params, barriers, cfg);
    double sum = 0, sum_sq = 0;
    for (double x : rec.terminal_x) {
      const double v = std::exp(x);
      sum += v;
      sum_sq += v * v;
    }
    const double n = static_cast<double>(cfg.n_paths);
    const double mean = sum / n;
    const double se = std::sqrt((sum_sq / n - mean * mean) / n);
    CHECK(std::abs(mean - 1.0) <= 3.0 * se);
  }
}

TEST_CASE("empirical jump frequency matches lambda") {
  const ProcessParams params(0.15, 1.0, 0.3);
  const double barriers[] = {4.0};
  PathConfig cfg{5.0, 1.0 / 250.0, 10000, 77, true, 0};
  const auto rec = simulate_crossings(params, barriers, cfg);
  double total = 0;
  for (auto c : rec.jump_count) total += c;
  const double rate = total / (cfg.horizon * static_cast<double>(cfg.n_paths));
  const double se = std::sqrt(params.lambda() / (cfg.horizon * static_cast<double>(cfg.n_paths)));
  CHECK(std::abs(rate - params.lambda()) <= 3.0 * se);
}

TEST_CASE("short-tenor pure-jump default probability matches the event-driven oracle") {
  // sigma ~ 0, lambda = 1, xi = 0.5: exact event-driven MC (sigma = 0, 2e7
  // samples) gives P(tau <= 0.25) = 0.0348663 +- 4.1e-5.
  const ProcessParams params(0.01, 1.0, 0.5);
  const double barriers[] = {1.0};
  PathConfig cfg{0.25, 1.0 / 100.0, 40000, 4321, false, 0};
  const auto rec = simulate_crossings(params, barriers, cfg);
  const double p_hat = crossed_fraction(rec.times(0));
  const double se = std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(cfg.n_paths));
  // allowance: 3 SE of each estimator plus a small sigma=0.01 vs sigma=0 gap
  CHECK(std::abs(p_hat - 0.0348663) <= 3.0 * se + 3.0 * 4.1e-5 + 5e-4);
}

TEST_CASE("pair: rho = 1 with identical diffusive dynamics gives identical records") {
  const ProcessParams params(0.2, 0.0, 0.25);
  const double barriers[] = {1.0};
  PathConfig cfg{10.0, 1.0 / 250.0, 5000, 5, true, 0};
  const auto joint = simulate_pair_crossings(params, params, 1.0, barriers, barriers, cfg);
  CHECK(joint.corporate.first_passage == joint.country.first_passage);
  CHECK(joint.corporate.terminal_x == joint.country.terminal_x);
}

TEST_CASE("pair: terminal Brownian drivers carry the requested correlation") {
  const ProcessParams corp(0.16, 0.5, 0.27);
  const ProcessParams ctry(0.32, 0.5, 0.25);
  const double barriers[] = {1.0};
  PathConfig cfg{10.0, 1.0 / 250.0, 20000, 5150, true, 0};

  for (double rho : {0.0, 0.8}) {
    const auto joint = simulate_pair_crossings(corp, ctry, rho, barriers, barriers, cfg);
    const double corr = sample_corr(joint.corporate.terminal_w, joint.country.terminal_w);
    const double se = (1.0 - rho * rho) / std::sqrt(static_cast<double>(cfg.n_paths));
    CHECK(std::abs(corr - rho) <= 3.0 * se);
  }
}

TEST_CASE("pair legs reproduce the single-name marginals in distribution") {
  const ProcessParams corp(0.2, 0.5, 0.3);
  const ProcessParams ctry(0.3, 0.25, 0.2);
  const double barriers[] = {1.0};
  PathConfig cfg{10.0, 1.0 / 250.0, 20000, 999, false, 0};
  const auto joint = simulate_pair_crossings(corp, ctry, 0.8, barriers, barriers, cfg);
  const auto single_corp = simulate_crossings(corp, barriers, cfg, StreamTag{0});
  const auto single_ctry = simulate_crossings(ctry, barriers, cfg, StreamTag{1});

  const double n = static_cast<double>(cfg.n_paths);
  for (const auto& [leg, single] :
       {std::pair{&joint.corporate, &single_corp}, std::pair{&joint.country, &single_ctry}}) {
    const double p_pair = crossed_fraction(leg->times(0));
    const double p_single = crossed_fraction(single->times(0));
    const double se = std::sqrt(p_single * (1.0 - p_single) / n);
    CHECK(std::abs(p_pair - p_single) <= 3.0 * std::sqrt(2.0) * se);
  }
}

TEST_CASE("pair: jump realisations are shared with the tagged single-name run") {
  // With rho irrelevant to jumps, the country leg of the pair and a
  // single-name run tagged entity 1 see identical jump streams.
  const ProcessParams corp(0.2, 0.0, 0.3);
  const ProcessParams ctry(0.3, 0.5, 0.2);
  const double barriers[] = {1.0};
  PathConfig cfg{5.0, 1.0 / 250.0, 4000, 321, true, 0};
  const auto joint = simulate_pair_crossings(corp, ctry, 0.8, barriers, barriers, cfg);
  const auto single = simulate_crossings(ctry, barriers, cfg, StreamTag{1});
  CHECK(joint.country.jump_count == single.jump_count);
}

TEST_CASE("input validation") {
  const ProcessParams params(0.2, 0.0, 0.25);
  PathConfig cfg{1.0, 1.0 / 250.0, 10, 0, false, 0};
  const double good[] = {1.0};
  CHECK_THROWS_AS(simulate_crossings(params, {}, cfg), std::invalid_argument);
  const double unsorted[] = {1.0, 0.5};
  CHECK_THROWS_AS(simulate_crossings(params, unsorted, cfg), std::invalid_argument);
  const double nonpositive[] = {0.0, 1.0};
  CHECK_THROWS_AS(simulate_crossings(params, nonpositive, cfg), std::invalid_argument);
  CHECK_THROWS_AS(simulate_pair_crossings(params, params, 1.5, good, good, cfg),
                  std::domain_error);
}
