#include "emcredit/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace emcredit::optimize {

ScalarResult golden_minimize(const std::function<double(double)>& f, double lo,
                             double hi, double x_tol, int max_iter) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  int evals = 2;
  for (int it = 0; it < max_iter && (b - a) > x_tol; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
    ++evals;
  }
  return f1 <= f2 ? ScalarResult{x1, f1, evals} : ScalarResult{x2, f2, evals};
}

SimplexResult nelder_mead_2d(const std::function<double(std::array<double, 2>)>& f,
                             std::array<double, 2> start,
                             std::array<double, 2> step,
                             std::array<double, 2> lo, std::array<double, 2> hi,
                             double x_tol, double f_tol, int max_evals) {
  using Point = std::array<double, 2>;
  const auto clamp = [&](Point p) {
    p[0] = std::clamp(p[0], lo[0], hi[0]);
    p[1] = std::clamp(p[1], lo[1], hi[1]);
    return p;
  };
  int evals = 0;
  const auto eval = [&](const Point& p) {
    ++evals;
    return f(p);
  };

  std::array<Point, 3> v{clamp(start),
                         clamp({start[0] + step[0], start[1]}),
                         clamp({start[0], start[1] + step[1]})};
  std::array<double, 3> fv{eval(v[0]), eval(v[1]), eval(v[2])};

  const auto order = [&] {
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return fv[i] < fv[j]; });
    std::array<Point, 3> nv{v[idx[0]], v[idx[1]], v[idx[2]]};
    std::array<double, 3> nf{fv[idx[0]], fv[idx[1]], fv[idx[2]]};
    v = nv;
    fv = nf;
  };
  order();

  while (evals < max_evals) {
    const double diam = std::max(
        std::abs(v[0][0] - v[2][0]) + std::abs(v[0][1] - v[2][1]),
        std::abs(v[0][0] - v[1][0]) + std::abs(v[0][1] - v[1][1]));
    if (diam < x_tol || std::abs(fv[2] - fv[0]) < f_tol) break;

    const Point centroid{0.5 * (v[0][0] + v[1][0]), 0.5 * (v[0][1] + v[1][1])};
    const auto move = [&](double coef) {
      return clamp({centroid[0] + coef * (centroid[0] - v[2][0]),
                    centroid[1] + coef * (centroid[1] - v[2][1])});
    };

    const Point reflected = move(1.0);
    const double f_ref = eval(reflected);
    if (f_ref < fv[0]) {
      const Point expanded = move(2.0);
      const double f_exp = eval(expanded);
      if (f_exp < f_ref) {
        v[2] = expanded;
        fv[2] = f_exp;
      } else {
        v[2] = reflected;
        fv[2] = f_ref;
      }
    } else if (f_ref < fv[1]) {
      v[2] = reflected;
      fv[2] = f_ref;
    } else {
      const Point contracted = move(-0.5);
      const double f_con = eval(contracted);
      if (f_con < fv[2]) {
        v[2] = contracted;
        fv[2] = f_con;
      } else {
        // shrink toward the best vertex
        for (int i = 1; i < 3; ++i) {
          v[i] = clamp({v[0][0] + 0.5 * (v[i][0] - v[0][0]),
                        v[0][1] + 0.5 * (v[i][1] - v[0][1])});
          fv[i] = eval(v[i]);
        }
      }
    }
    order();
  }
  return SimplexResult{v[0], fv[0], evals};
}

std::vector<double> solve_linear_system(std::vector<double> a, std::vector<double> b,
                                        std::size_t n, double pivot_tol) {
  if (a.size() != n * n || b.size() != n)
    throw std::invalid_argument("solve_linear_system: dimension mismatch");
  double scale = 0.0;
  for (double x : a) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) throw std::runtime_error("solve_linear_system: zero matrix");

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    if (std::abs(a[pivot * n + col]) < pivot_tol * scale)
      throw std::runtime_error("solve_linear_system: singular system");
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[pivot * n + c]);
      std::swap(b[col], b[pivot]);
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      const double factor = a[r * n + col] / a[col * n + col];
      if (factor == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= factor * a[col * n + c];
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double sum = b[i];
    for (std::size_t c = i + 1; c < n; ++c) sum -= a[i * n + c] * x[c];
    x[i] = sum / a[i * n + i];
  }
  return x;
}

}  // namespace emcredit::optimize
