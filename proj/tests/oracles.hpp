#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's numerics beyond the oracles under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>
#include <unsupported/Eigen/MatrixFunctions>

#include "saddleflow/lp.hpp"
#include "saddleflow/problem.hpp"

namespace oracle {

using saddleflow::Mat;
using saddleflow::Vec;

inline Vec random_vec(std::mt19937_64& rng, Eigen::Index n, double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

inline Mat random_mat(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double lo = -2.0,
                      double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Mat a(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) a(i, j) = u(rng);
  return a;
}

// Central differences of a scalar function along every coordinate.
template <class F>
Vec central_difference(F&& f, const Vec& at, double h = 1e-5) {
  Vec g(at.size());
  for (Eigen::Index i = 0; i < at.size(); ++i) {
    Vec p = at, q = at;
    p[i] += h;
    q[i] -= h;
    g[i] = (f(p) - f(q)) / (2.0 * h);
  }
  return g;
}

inline double relative_error(const Vec& approx, const Vec& exact) {
  return (approx - exact).norm() / std::max(1.0, exact.norm());
}

struct FdGap {
  double x = 0.0;
  double y = 0.0;
};

// Compares the gradient oracles of prob with finite differences of its value.
inline FdGap gradient_fd_gap(const saddleflow::SaddleProblem& prob, const Vec& x, const Vec& y) {
  const Vec gx = central_difference([&](const Vec& v) { return prob.value(v, y); }, x);
  const Vec gy = central_difference([&](const Vec& v) { return prob.value(x, v); }, y);
  return {relative_error(gx, prob.grad_x(x, y)), relative_error(gy, prob.grad_y(x, y))};
}

// exp(M t) s0 for a linear ODE sdot = M s.
inline Vec linear_flow(const Mat& m, const Vec& s0, double t) {
  const Mat e = (m * t).exp();
  return e * s0;
}

// Regularized bilinear flow on [x; z; y; w] written out by hand.
inline Mat regularized_bilinear_matrix(double rho) {
  const double k = 1.0 / rho;
  Mat m(4, 4);
  // xdot = -y - (x - z)/rho
  m.row(0) << -k, k, -1.0, 0.0;
  // zdot = (x - z)/rho
  m.row(1) << k, -k, 0.0, 0.0;
  // ydot = x - (y - w)/rho
  m.row(2) << 1.0, 0.0, -k, k;
  // wdot = (y - w)/rho
  m.row(3) << 0.0, 0.0, k, -k;
  return m;
}

// Random LP with a strictly feasible point x0 (b = A x0 + slack) and a
// dual-feasible cost c = -A^T lambda, lambda > 0, hence bounded.
inline saddleflow::LinearProgram random_bounded_lp(std::mt19937_64& rng, int n, int m) {
  std::uniform_real_distribution<double> slack(0.1, 1.0);
  std::uniform_real_distribution<double> lam(0.1, 1.0);
  saddleflow::LinearProgram lp;
  lp.a = random_mat(rng, m, n);
  const Vec x0 = random_vec(rng, n, -1.0, 1.0);
  lp.b = lp.a * x0;
  for (int j = 0; j < m; ++j) lp.b[j] += slack(rng);
  Vec l(m);
  for (int j = 0; j < m; ++j) l[j] = lam(rng);
  lp.c = -lp.a.transpose() * l;
  return lp;
}

// Hand-written KKT check: c + A^T y, max(A x - b), min(y), y^T (A x - b).
struct Kkt {
  double stationarity;
  double primal;
  double dual;
  double complementarity;
};

inline Kkt kkt(const saddleflow::LinearProgram& lp, const Vec& x, const Vec& y) {
  Kkt k{};
  k.stationarity = (lp.c + lp.a.transpose() * y).norm();
  const Vec r = lp.a * x - lp.b;
  k.primal = r.size() ? std::max(0.0, r.maxCoeff()) : 0.0;
  k.dual = y.size() ? std::max(0.0, -y.minCoeff()) : 0.0;
  k.complementarity = std::abs(y.dot(r));
  return k;
}

}  // namespace oracle
