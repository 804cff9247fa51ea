#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include <boost/math/policies/policy.hpp>
#include <boost/math/special_functions/erf.hpp>

namespace emcredit::rng {

// double-only internals; the default policy promotes to long double and
// roughly triples the cost of every quantile evaluation
using FastPolicy =
    boost::math::policies::policy<boost::math::policies::promote_double<false>>;

// Philox4x32-10 counter-based generator (Salmon, Moraes, Dror, Shaw 2011).
// Every random variate in a simulation is addressed by
// (seed, path, driver, index), so path chunks can be handed to workers in
// any order, bridge uniforms can be skipped when provably irrelevant, and
// calibration candidates see identical noise without storing driver paths.

struct Philox4x32 {
  static constexpr std::uint32_t kMult0 = 0xD2511F53u;
  static constexpr std::uint32_t kMult1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::uint32_t key0,
                                            std::uint32_t key1) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key0 += kWeyl0;
        key1 += kWeyl1;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMult0) * ctr[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMult1) * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key0,
             static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key1,
             static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }
};

// Stream roles. Values are stable across releases: they are part of the
// bit-reproducibility contract of seeded runs.
enum class Driver : std::uint32_t {
  kGauss = 0,        // single-entity diffusion increments
  kBridge = 1,       // single-entity bridge-crossing uniforms
  kJumpTime = 2,     // jump inter-arrival uniforms
  kJumpMark = 3,     // jump magnitude uniforms
  kGaussPlus = 4,    // pair simulation: shared driver W+
  kGaussMinus = 5,   // pair simulation: shared driver W-
  kBridgePair = 6,   // pair simulation: bridge uniforms, shared by both legs
};

// Uniform double in the open interval (0,1).
inline double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal quantile. The erfc_inv form keeps full precision in the
// tails, where 2u - 1 would cancel.
inline double normal_quantile(double u) {
  constexpr double kSqrt2 = 1.4142135623730951;
  if (u < 0.5) return -kSqrt2 * boost::math::erfc_inv(2.0 * u, FastPolicy());
  return kSqrt2 * boost::math::erfc_inv(2.0 * (1.0 - u), FastPolicy());
}

// Random access into one (seed, path, driver, entity) stream.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t path, Driver driver,
         std::uint32_t entity = 0)
      : key0_(static_cast<std::uint32_t>(seed)),
        key1_(static_cast<std::uint32_t>(seed >> 32)),
        path_(static_cast<std::uint32_t>(path)),
        stream_(static_cast<std::uint32_t>(driver) | (entity << 8)) {}

  double uniform(std::uint32_t index) const {
    const auto out = Philox4x32::block({path_, stream_, index, 0}, key0_, key1_);
    return to_open_unit(static_cast<std::uint64_t>(out[0]) |
                        (static_cast<std::uint64_t>(out[1]) << 32));
  }

  double normal(std::uint32_t index) const { return normal_quantile(uniform(index)); }

  // Mean-one exponential variate.
  double exponential(std::uint32_t index) const { return -std::log(uniform(index)); }

 private:
  std::uint32_t key0_, key1_, path_, stream_;
};

}  // namespace emcredit::rng
