#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>

#include "saddleflow/flows.hpp"
#include "saddleflow/integrate.hpp"
#include "saddleflow/problem.hpp"

namespace saddleflow {

/// min c^T x  s.t.  A x - b <= 0.
struct LinearProgram {
  Vec c;
  Mat a;  // m x n
  Vec b;

  [[nodiscard]] std::size_t n() const { return static_cast<std::size_t>(c.size()); }
  [[nodiscard]] std::size_t m() const { return static_cast<std::size_t>(b.size()); }
  [[nodiscard]] double objective(const Vec& x) const { return c.dot(x); }
  /// Throws InvalidArgument on inconsistent dimensions or non-finite entries.
  void validate() const;
};

// Fixed-order sums shared by the centralized gradients and the per-agent
// updates, so both paths round identically.
double column_dot(const Mat& a, Eigen::Index col, const Vec& y);
double row_dot(const Mat& a, Eigen::Index row, const Vec& x);

/// S(x, y) = c^T x + y^T (A x - b).
SaddleProblem lagrangian(const LinearProgram& lp);

/// Reads `n m`, then c, then m rows of `A_j... b_j`.
LinearProgram read_lp(std::istream& in);
LinearProgram read_lp_file(const std::string& path);
void write_lp(std::ostream& out, const LinearProgram& lp);

/// KKT residuals of a primal-dual pair.
struct KktResiduals {
  double stationarity = 0.0;     // |c + A^T y|
  double primal_infeasibility = 0.0;  // max(0, max_j (A x - b)_j)
  double dual_infeasibility = 0.0;    // max(0, -min_j y_j)
  double complementarity = 0.0;  // |y^T (A x - b)|
};

KktResiduals kkt_residuals(const LinearProgram& lp, const PointPair& p);

struct LpSolveResult {
  PointPair solution;
  Trajectory trajectory;
  StopReason stop;
  double objective = 0.0;
  std::string diagnostic;
  [[nodiscard]] bool converged() const { return stop.tag == StopTag::Converged; }
};

/// Drift test used to call a non-converging LP run unbounded or infeasible.
/// True when, over the second half of the recorded horizon, the field norm
/// did not decay (end >= 0.9 * midpoint), the state moved at least half the
/// distance the terminal field norm would carry it, and that displacement is
/// at least a quarter of the midpoint state's norm.
bool looks_ballistic(const Trajectory& traj, const VectorField& field);

/// Integrates the projected regularized flow of the LP Lagrangian from init
/// (all zeros by default) and recovers (x*, y*) on convergence.
LpSolveResult solve(const LinearProgram& lp, const RegularizationConfig& cfg = {3.0},
                    const IntegratorConfig& icfg = {},
                    const std::optional<AugmentedState>& init = std::nullopt,
                    double extract_tol = 1e-6);

}  // namespace saddleflow
