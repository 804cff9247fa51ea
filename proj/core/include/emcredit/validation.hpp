#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace emcredit {

// One row of the self-check report: pass/fail/skip plus the measured value
// against its threshold.
struct ValidationCheck {
  std::string name;
  std::string status;  // "pass" | "fail" | "skip"
  double measured = 0.0;
  double threshold = 0.0;
  std::string note;
};

struct ValidationConfig {
  std::uint64_t seed = 4242;
  std::size_t n_paths = 20000;
  double dt = 1.0 / 250.0;
  int threads = 0;
  // Shifts the drift seen by the martingale check; nonzero values emulate a
  // mis-derived drift and must make that check fail.
  double drift_offset = 0.0;
};

// Runs the module invariant suites (martingale conservation, barrier
// monotonicity, pure-diffusion oracle agreement, jump frequency,
// determinism across worker counts, basket dominance and limits, curve-fit
// round-trip, and the Monte Carlo precision claim when n_paths permits).
// Failures are report content, not errors.
std::vector<ValidationCheck> run_validation(const ValidationConfig& cfg);

}  // namespace emcredit
