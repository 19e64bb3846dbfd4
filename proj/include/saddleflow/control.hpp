#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "saddleflow/errors.hpp"
#include "saddleflow/integrate.hpp"
#include "saddleflow/lp.hpp"

namespace saddleflow {

/// min sum_t |x(t+1)|_1 + |u(t)|_1  s.t.  x(t+1) = G x(t) + H u(t), D x(T) <= d.
struct ControlProblem {
  Mat g;   // N x N dynamics
  Mat h;   // N x N control
  Mat d;   // M x N final-state constraint
  Vec dv;  // M
  Vec x0;  // N
  std::size_t horizon = 1;  // T

  [[nodiscard]] std::size_t agents() const { return static_cast<std::size_t>(x0.size()); }
  [[nodiscard]] std::size_t final_rows() const { return static_cast<std::size_t>(dv.size()); }
  void validate() const;
};

/// Layout of the split LP. Variables: x+ (t = 1..T), x-, u+ (t = 0..T-1), u-,
/// each block time-major with N entries per slot. Rows: dynamics as "<=",
/// dynamics negated, final-state rows, then one -I row per variable.
struct VariableMap {
  std::size_t n_agents = 0;
  std::size_t horizon = 0;

  [[nodiscard]] std::size_t block() const { return n_agents * horizon; }
  [[nodiscard]] std::size_t variables() const { return 4 * block(); }
  [[nodiscard]] std::size_t x_plus(std::size_t t, std::size_t i) const;   // t in 1..T
  [[nodiscard]] std::size_t x_minus(std::size_t t, std::size_t i) const;  // t in 1..T
  [[nodiscard]] std::size_t u_plus(std::size_t t, std::size_t i) const;   // t in 0..T-1
  [[nodiscard]] std::size_t u_minus(std::size_t t, std::size_t i) const;  // t in 0..T-1

  std::size_t dynamics_rows = 0;     // first row of the dynamics block (2 N T rows)
  std::size_t final_row_begin = 0;   // first final-state row
  std::size_t final_row_count = 0;
  std::size_t nonneg_row_begin = 0;

  /// (x(1..T), u(0..T-1)) recombined from the split variables.
  [[nodiscard]] std::vector<Vec> states(const Vec& lp_x) const;
  [[nodiscard]] std::vector<Vec> controls(const Vec& lp_x) const;
  /// Column names x+_t_i etc. for CSV headers.
  [[nodiscard]] std::vector<std::string> variable_names() const;
};

struct ControlLp {
  LinearProgram lp;
  VariableMap map;
};

ControlLp build_lp(const ControlProblem& cp);

/// Rolls x(t+1) = G x(t) + H u(t) forward from x0; returns x(1..T).
std::vector<Vec> simulate(const ControlProblem& cp, const std::vector<Vec>& u);

struct ControlSolution {
  std::vector<Vec> u;  // u(0..T-1)
  std::vector<Vec> x;  // x(1..T), replayed from u
  double objective = 0.0;
};

/// sum_t |x(t+1)|_1 + |u(t)|_1
double control_objective(const std::vector<Vec>& x, const std::vector<Vec>& u);

/// Recombines an LP solution and replays the dynamics.
ControlSolution recover_solution(const ControlProblem& cp, const VariableMap& map, const Vec& lp_x);

/// Reads `N M T`, then G (N rows), H (N rows), D (M rows), d (M), x0 (N).
ControlProblem read_control(std::istream& in);
ControlProblem read_control_file(const std::string& path);

/// The two-agent, two-slot instance with its published optimum.
ControlProblem two_agent_instance();

struct PublishedSolution {
  std::vector<Vec> u;  // u*(0), u*(1)
  std::vector<Vec> x;  // x*(1), x*(2)
};

PublishedSolution published_solution();

inline constexpr double kCaseRho = 3.0;

struct ReproductionDiagnostics {
  StopReason stop;
  double max_deviation = 0.0;  // max over all components of |computed - published|
  std::vector<Vec> u_deviation;
  std::vector<Vec> x_deviation;
  double min_final_dual = 0.0;  // min over recorded samples of the final-state dual(s)
  double max_split_overlap = 0.0;  // max_i min(v+_i, v-_i) at the solution
  double lp_objective = 0.0;
  double seconds = 0.0;
  LpSolveResult run;
  ControlLp control_lp;
};

/// The reproduction run stopped without converging; carries the run.
class ReproductionFailure : public Error {
 public:
  ReproductionFailure(const std::string& what, ReproductionDiagnostics diag)
      : Error(what), diagnostics(std::move(diag)) {}
  ReproductionDiagnostics diagnostics;
};

struct ReproductionResult {
  ControlSolution solution;
  ReproductionDiagnostics diagnostics;
};

/// Builds the published instance, solves its LP with the projected
/// regularized flow at rho = 3 and compares against the published optimum.
/// Throws ReproductionFailure if the flow does not converge.
ReproductionResult reproduce_paper_case(const IntegratorConfig& icfg = {});

}  // namespace saddleflow
