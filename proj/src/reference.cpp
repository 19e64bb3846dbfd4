#include "saddleflow/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/LU>

#include "saddleflow/errors.hpp"

namespace saddleflow {

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal:
      return "optimal";
    case LpStatus::Infeasible:
      return "infeasible";
    case LpStatus::Unbounded:
      return "unbounded";
  }
  return "unknown";
}

namespace {

// C(m, r), saturating at max + 1.
std::uint64_t binomial(std::uint64_t m, std::uint64_t r, std::uint64_t max) {
  r = std::min(r, m - r);
  double acc = 1.0;
  for (std::uint64_t i = 1; i <= r; ++i) {
    acc = acc * static_cast<double>(m - r + i) / static_cast<double>(i);
    if (acc > static_cast<double>(max)) return max + 1;
  }
  return static_cast<std::uint64_t>(std::llround(acc));
}

// Advances idx to the next r-subset of {0..m-1} in lexicographic order.
bool next_combination(std::vector<Eigen::Index>& idx, Eigen::Index m) {
  const auto r = static_cast<Eigen::Index>(idx.size());
  Eigen::Index i = r - 1;
  while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - r + i) --i;
  if (i < 0) return false;
  ++idx[static_cast<std::size_t>(i)];
  for (Eigen::Index k = i + 1; k < r; ++k) {
    idx[static_cast<std::size_t>(k)] = idx[static_cast<std::size_t>(k - 1)] + 1;
  }
  return true;
}

}  // namespace

ReferenceSolution reference_solve(const LinearProgram& lp, double tol) {
  lp.validate();
  const Eigen::Index n = lp.a.cols();
  const Eigen::Index m = lp.a.rows();
  const double scale = 1.0 + std::max({lp.a.size() ? lp.a.cwiseAbs().maxCoeff() : 0.0,
                                       m ? lp.b.cwiseAbs().maxCoeff() : 0.0,
                                       lp.c.cwiseAbs().maxCoeff()});
  const double eps = tol * scale;

  Eigen::Index rank = 0;
  if (m > 0) {
    Eigen::FullPivLU<Mat> lu(lp.a);
    lu.setThreshold(1e-10);
    rank = lu.rank();
  }
  const std::uint64_t count =
      binomial(static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(rank), kMaxEnumeratedBases);
  if (count > kMaxEnumeratedBases) {
    throw UnsupportedScale("vertex enumeration would examine more than " +
                           std::to_string(kMaxEnumeratedBases) + " bases (m = " +
                           std::to_string(m) + ", rank = " + std::to_string(rank) + ")");
  }

  ReferenceSolution out;
  bool any_feasible = false;
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(rank));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  do {
    ++out.bases_examined;
    Mat as(rank, n);
    Vec bs(rank);
    for (Eigen::Index k = 0; k < rank; ++k) {
      as.row(k) = lp.a.row(idx[static_cast<std::size_t>(k)]);
      bs[k] = lp.b[idx[static_cast<std::size_t>(k)]];
    }
    Vec x = Vec::Zero(n);
    Vec ys = Vec::Zero(rank);
    if (rank > 0) {
      const Mat gram = as * as.transpose();
      Eigen::FullPivLU<Mat> lu(gram);
      lu.setThreshold(1e-10);
      if (!lu.isInvertible()) continue;
      // Minimum-norm point of the tight system, and the dual that zeroes
      // the stationarity residual on the chosen rows.
      x = as.transpose() * lu.solve(bs);
      ys = -lu.solve(as * lp.c);
    }
    const Vec slack = lp.a * x - lp.b;
    if (m > 0 && slack.maxCoeff() > eps) continue;
    any_feasible = true;
    const Vec stationarity = lp.c + as.transpose() * ys;
    if (stationarity.norm() > eps) continue;
    if (rank > 0 && ys.minCoeff() < -eps) continue;

    out.status = LpStatus::Optimal;
    out.x = x;
    out.y = Vec::Zero(m);
    for (Eigen::Index k = 0; k < rank; ++k) {
      out.y[idx[static_cast<std::size_t>(k)]] = std::max(ys[k], 0.0);
    }
    out.objective = lp.c.dot(x);
    return out;
  } while (next_combination(idx, m));

  out.status = any_feasible ? LpStatus::Unbounded : LpStatus::Infeasible;
  return out;
}

}  // namespace saddleflow
