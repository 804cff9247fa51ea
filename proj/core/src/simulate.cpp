#include "emcredit/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <thread>

#include "emcredit/rng.hpp"

namespace emcredit {
namespace {

// Bridge probabilities at or below the smallest representable uniform can
// never fire; skipping them is exactly equivalent to drawing the uniform.
constexpr double kMinUniform = 5e-17;
// exp(-arg) <= kMinUniform for arg >= 38.
constexpr double kBridgeArgCutoff = 38.0;

void validate_barriers(std::span<const double> barriers) {
  if (barriers.empty())
    throw std::invalid_argument("simulate: barriers must be nonempty");
  double prev = 0.0;
  for (double level : barriers) {
    if (!(level > prev))
      throw std::invalid_argument("simulate: barriers must be strictly increasing and > 0");
    prev = level;
  }
}

// Per-path mutable state of one entity while walking the merged grid.
struct EntityWalk {
  double sigma, mu, xi, lambda;
  double two_over_sigma_sq;  // 2 / sigma^2
  std::span<const double> barriers;
  rng::Stream jump_time_stream, jump_mark_stream, bridge_stream;
  double* fp;               // first_passage column base, stride n_paths
  std::size_t n_paths = 0, path = 0;

  double x = 0.0, w = 0.0;
  double next_jump = kNever;
  std::uint32_t jump_idx = 0, n_jumps = 0;
  std::size_t next_barrier = 0;

  void reset(std::size_t p, double horizon) {
    path = p;
    x = 0.0;
    w = 0.0;
    jump_idx = 0;
    n_jumps = 0;
    next_barrier = 0;
    next_jump = kNever;
    if (lambda > 0.0) {
      next_jump = jump_time_stream.exponential(jump_idx++) / lambda;
      if (next_jump > horizon) next_jump = kNever;
    }
  }

  bool done() const { return next_barrier == barriers.size(); }

  void record(double t) { fp[next_barrier * n_paths + path] = t; ++next_barrier; }

  // Endpoint test plus, for diffusion moves, the bridge test on (x_prev, x).
  // One lazily drawn uniform per sub-interval is shared by all barrier
  // levels, which keeps crossing times monotone in depth pathwise.
  void check_after_diffusion(double x_prev, double delta, double t, std::uint32_t step) {
    double u = -1.0;
    while (next_barrier < barriers.size()) {
      const double level = barriers[next_barrier];
      if (x < -level) {
        record(t);
        continue;
      }
      const double arg = (x_prev + level) * (x + level) * two_over_sigma_sq / delta;
      if (arg >= kBridgeArgCutoff) break;
      const double p = std::exp(-arg);
      if (p <= kMinUniform) break;
      if (u < 0.0) u = bridge_stream.uniform(step);
      if (u >= p) break;
      record(t);
    }
  }

  void check_after_jump(double t) {
    while (next_barrier < barriers.size() && x < -barriers[next_barrier]) record(t);
  }

  void advance_jump(double horizon) {
    ++n_jumps;
    next_jump += jump_time_stream.exponential(jump_idx++) / lambda;
    if (next_jump > horizon) next_jump = kNever;
  }
};

struct Grid {
  double dt, horizon;
  std::size_t n_steps;
};

// Walks one path over the merged grid (regular steps plus both entities'
// jump times), evolving every entity with Brownian increments supplied by
// `gauss(step, z[])`. Entities share the sub-interval ordinal `step` that
// indexes all per-step streams.
template <std::size_t N, typename GaussFn>
void walk_path(const Grid& grid, std::array<EntityWalk, N>& ents, GaussFn&& gauss,
               bool record_terminal) {
  double t = 0.0;
  std::uint32_t step = 0;
  std::size_t reg = 1;
  while (reg <= grid.n_steps) {
    const double reg_time = reg == grid.n_steps ? grid.horizon
                                                : static_cast<double>(reg) * grid.dt;
    double t_next = reg_time;
    for (const auto& e : ents) t_next = std::min(t_next, e.next_jump);

    const double delta = t_next - t;
    if (delta > 0.0) {
      std::array<double, N> z;
      gauss(step, z);
      const double sqrt_delta = std::sqrt(delta);
      for (std::size_t i = 0; i < N; ++i) {
        auto& e = ents[i];
        const double x_prev = e.x;
        e.x += e.mu * delta + e.sigma * sqrt_delta * z[i];
        e.w += sqrt_delta * z[i];
        if (!e.done()) e.check_after_diffusion(x_prev, delta, t_next, step);
      }
    }
    for (auto& e : ents) {
      while (e.next_jump == t_next) {
        e.x -= e.xi * e.jump_mark_stream.exponential(e.jump_idx - 1);
        if (!e.done()) e.check_after_jump(t_next);
        e.advance_jump(grid.horizon);
      }
    }
    if (t_next == reg_time) ++reg;
    t = t_next;
    ++step;

    if (!record_terminal) {
      bool all_done = true;
      for (const auto& e : ents) all_done &= e.done();
      if (all_done) break;
    }
  }
}

void run_chunked(std::size_t n_paths, int n_threads,
                 const std::function<void(std::size_t, std::size_t)>& work) {
  constexpr std::size_t kChunk = 2048;
  unsigned threads = n_threads > 0 ? static_cast<unsigned>(n_threads)
                                   : std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_chunks = (n_paths + kChunk - 1) / kChunk;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_chunks));
  if (threads <= 1) {
    work(0, n_paths);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      work(c * kChunk, std::min(n_paths, (c + 1) * kChunk));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

CrossingRecord make_record(std::span<const double> barriers, const PathConfig& cfg) {
  CrossingRecord rec;
  rec.barriers.assign(barriers.begin(), barriers.end());
  rec.n_paths = cfg.n_paths;
  rec.first_passage.assign(barriers.size() * cfg.n_paths, kNever);
  if (cfg.record_terminal) {
    rec.terminal_x.resize(cfg.n_paths);
    rec.terminal_w.resize(cfg.n_paths);
    rec.jump_count.resize(cfg.n_paths);
  }
  return rec;
}

}  // namespace

std::size_t CrossingRecord::barrier_index(double level) const {
  for (std::size_t i = 0; i < barriers.size(); ++i)
    if (barriers[i] == level) return i;
  throw std::invalid_argument("CrossingRecord: barrier level not recorded");
}

CrossingRecord simulate_crossings(const ProcessParams& params,
                                  std::span<const double> barriers,
                                  const PathConfig& cfg, StreamTag tag) {
  cfg.validate();
  validate_barriers(barriers);
  const Grid grid{cfg.dt, static_cast<double>(cfg.n_steps()) * cfg.dt, cfg.n_steps()};
  CrossingRecord rec = make_record(barriers, cfg);

  run_chunked(cfg.n_paths, cfg.n_threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      std::array<EntityWalk, 1> ents{EntityWalk{
          params.sigma(), params.mu(), params.xi(), params.lambda(),
          2.0 / (params.sigma() * params.sigma()), barriers,
          rng::Stream(cfg.seed, p, rng::Driver::kJumpTime, tag.entity),
          rng::Stream(cfg.seed, p, rng::Driver::kJumpMark, tag.entity),
          rng::Stream(cfg.seed, p, rng::Driver::kBridge, tag.entity),
          rec.first_passage.data(), cfg.n_paths}};
      ents[0].reset(p, grid.horizon);
      rng::Stream gauss(cfg.seed, p, rng::Driver::kGauss, tag.entity);
      walk_path(grid, ents,
                [&](std::uint32_t step, std::array<double, 1>& z) {
                  z[0] = gauss.normal(step);
                },
                cfg.record_terminal);
      if (cfg.record_terminal) {
        rec.terminal_x[p] = ents[0].x;
        rec.terminal_w[p] = ents[0].w;
        rec.jump_count[p] = ents[0].n_jumps;
      }
    }
  });
  return rec;
}

JointCrossings simulate_pair_crossings(const ProcessParams& params_a,
                                       const ProcessParams& params_c, double rho,
                                       std::span<const double> barriers_a,
                                       std::span<const double> barriers_c,
                                       const PathConfig& cfg) {
  cfg.validate();
  validate_barriers(barriers_a);
  validate_barriers(barriers_c);
  if (!(rho >= -1.0 && rho <= 1.0))
    throw std::domain_error("simulate_pair_crossings: rho must lie in [-1, 1]");

  const Grid grid{cfg.dt, static_cast<double>(cfg.n_steps()) * cfg.dt, cfg.n_steps()};
  JointCrossings joint;
  joint.rho = rho;
  joint.corporate = make_record(barriers_a, cfg);
  joint.country = make_record(barriers_c, cfg);
  const double w_plus = std::sqrt((1.0 + rho) / 2.0);
  const double w_minus = std::sqrt((1.0 - rho) / 2.0);

  run_chunked(cfg.n_paths, cfg.n_threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      std::array<EntityWalk, 2> ents{
          EntityWalk{params_a.sigma(), params_a.mu(), params_a.xi(), params_a.lambda(),
                     2.0 / (params_a.sigma() * params_a.sigma()), barriers_a,
                     rng::Stream(cfg.seed, p, rng::Driver::kJumpTime, 0),
                     rng::Stream(cfg.seed, p, rng::Driver::kJumpMark, 0),
                     rng::Stream(cfg.seed, p, rng::Driver::kBridgePair, 0),
                     joint.corporate.first_passage.data(), cfg.n_paths},
          EntityWalk{params_c.sigma(), params_c.mu(), params_c.xi(), params_c.lambda(),
                     2.0 / (params_c.sigma() * params_c.sigma()), barriers_c,
                     rng::Stream(cfg.seed, p, rng::Driver::kJumpTime, 1),
                     rng::Stream(cfg.seed, p, rng::Driver::kJumpMark, 1),
                     rng::Stream(cfg.seed, p, rng::Driver::kBridgePair, 0),
                     joint.country.first_passage.data(), cfg.n_paths}};
      ents[0].reset(p, grid.horizon);
      ents[1].reset(p, grid.horizon);
      rng::Stream plus(cfg.seed, p, rng::Driver::kGaussPlus, 0);
      rng::Stream minus(cfg.seed, p, rng::Driver::kGaussMinus, 0);
      walk_path(grid, ents,
                [&](std::uint32_t step, std::array<double, 2>& z) {
                  const double zp = plus.normal(step);
                  const double zm = minus.normal(step);
                  z[0] = w_plus * zp + w_minus * zm;
                  z[1] = w_plus * zp - w_minus * zm;
                },
                cfg.record_terminal);
      for (int i = 0; i < 2; ++i) {
        auto& rec = i == 0 ? joint.corporate : joint.country;
        if (cfg.record_terminal) {
          rec.terminal_x[p] = ents[i].x;
          rec.terminal_w[p] = ents[i].w;
          rec.jump_count[p] = ents[i].n_jumps;
        }
      }
    }
  });
  return joint;
}

}  // namespace emcredit
