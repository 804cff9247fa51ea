#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "emcredit/process.hpp"

namespace emcredit {

inline constexpr double kNever = std::numeric_limits<double>::infinity();

// Identifies which entity's driver streams a single-entity simulation
// consumes. Pair simulations use entity 0 for the corporate leg and 1 for
// the country leg; a single-entity run with the same tag, seed and jump
// parameters reproduces the identical jump realisations.
struct StreamTag {
  std::uint32_t entity = 0;
};

// First-passage times per (barrier, path), kNever if the barrier was not
// breached within the horizon. Barriers are stored ascending; on any path
// the crossing time is non-decreasing in barrier depth.
struct CrossingRecord {
  std::vector<double> barriers;
  std::size_t n_paths = 0;
  std::vector<double> first_passage;       // [barrier_idx * n_paths + path]
  std::vector<double> terminal_x;          // empty unless cfg.record_terminal
  std::vector<double> terminal_w;          // accumulated unit Brownian driver
  std::vector<std::uint32_t> jump_count;   // per path, with record_terminal

  std::span<const double> times(std::size_t barrier_idx) const {
    return {first_passage.data() + barrier_idx * n_paths, n_paths};
  }
  // Index of an exact barrier level; throws if absent.
  std::size_t barrier_index(double level) const;
};

// Corporate/country legs drawn from one joint scenario. Basket variants
// composed from the same JointCrossings share all randomness.
struct JointCrossings {
  CrossingRecord corporate;
  CrossingRecord country;
  double rho = 0.0;
};

// Simulates log firm value X_t = mu t + sigma W_t - xi J_t from X_0 = 0 and
// records the first passage below -L for every requested barrier L.
// Jump times are exact exponential arrivals merged into the regular grid;
// each diffusion sub-interval applies the Brownian-bridge crossing test.
// Output is a deterministic function of (params, barriers, cfg, tag).
CrossingRecord simulate_crossings(const ProcessParams& params,
                                  std::span<const double> barriers,
                                  const PathConfig& cfg, StreamTag tag = {});

// Joint simulation of both entities with Brownian drivers built as
//   W_a = sqrt((1+rho)/2) W+ + sqrt((1-rho)/2) W-,
//   W_c = sqrt((1+rho)/2) W+ - sqrt((1-rho)/2) W-,
// and mutually independent jump processes.
JointCrossings simulate_pair_crossings(const ProcessParams& params_a,
                                       const ProcessParams& params_c, double rho,
                                       std::span<const double> barriers_a,
                                       std::span<const double> barriers_c,
                                       const PathConfig& cfg);

}  // namespace emcredit
