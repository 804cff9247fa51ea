#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

namespace emcredit::optimize {

struct ScalarResult {
  double x = 0.0;
  double value = 0.0;
  int evaluations = 0;
};

// Golden-section search on [lo, hi]; assumes quasi-convexity on the bracket.
ScalarResult golden_minimize(const std::function<double(double)>& f, double lo,
                             double hi, double x_tol, int max_iter = 200);

struct SimplexResult {
  std::array<double, 2> x{};
  double value = 0.0;
  int evaluations = 0;
};

// Nelder-Mead in two dimensions with box clamping. Deterministic; stops on
// simplex diameter, value spread, or evaluation budget.
SimplexResult nelder_mead_2d(const std::function<double(std::array<double, 2>)>& f,
                             std::array<double, 2> start,
                             std::array<double, 2> step,
                             std::array<double, 2> lo, std::array<double, 2> hi,
                             double x_tol, double f_tol, int max_evals);

// Solves the dense system A x = b by Gaussian elimination with partial
// pivoting; A is row-major n*n. Throws std::runtime_error on a pivot below
// `pivot_tol` times the largest row scale (singular / underdetermined).
std::vector<double> solve_linear_system(std::vector<double> a, std::vector<double> b,
                                        std::size_t n, double pivot_tol = 1e-12);

}  // namespace emcredit::optimize
