#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "saddleflow/flows.hpp"
#include "saddleflow/integrate.hpp"

namespace saddleflow::cli {

enum ExitCode : int {
  kExitConverged = 0,
  kExitUsage = 1,
  kExitHorizon = 2,
  kExitDiverged = 3,
};

/// Maps a stop reason to the process exit status. Inner failures count as
/// diverged runs.
int exit_code(StopTag tag);

struct RunConfig {
  std::string command = "run";  // run | solve-lp | distributed-lp | reproduce-paper
  std::string problem = "bilinear";  // builtin name, lp:<path>, control:<path>, or a file path
  std::string flow = "regularized";  // a FlowKind name or "distributed"
  double rho = 3.0;
  Scheme scheme = Scheme::Rk4;
  double dt = 1e-3;
  double t_max = 2000.0;
  double tol = 1e-8;
  std::size_t conv_window = 10;
  std::size_t record_stride = 100;
  std::string out = "saddleflow";

  [[nodiscard]] IntegratorConfig integrator() const;
};

/// Applies `key = value` lines onto cfg. Blank lines and '#' comments are
/// skipped. Throws ParseError naming the offending key or line.
void apply_config(std::istream& in, RunConfig& cfg);
void apply_config_file(const std::string& path, RunConfig& cfg);

/// Which columns a trajectory CSV carries.
struct CsvLayout {
  std::size_t nx = 0;
  std::size_t nz = 0;
  std::size_t ny = 0;
  std::size_t nw = 0;
  std::string primal_prefix = "x";  // "z" for the proximal state (z, y)
  bool lyapunov = false;
  bool certificate = false;
  bool residual = false;

  [[nodiscard]] std::size_t state_dim() const { return nx + nz + ny + nw; }
  [[nodiscard]] std::vector<std::string> header() const;
};

CsvLayout layout_for(const VectorField& field, bool lyapunov, bool certificate, bool residual);

/// Writes `t,<state columns>,[V,][h1,h2,][residual]` with 17 significant digits.
/// Throws Error when the trajectory is empty or the file cannot be written.
void export_trajectory(const Trajectory& traj, const CsvLayout& layout, const std::string& path);
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const CsvLayout& layout);

struct CsvTrajectory {
  std::vector<std::string> columns;
  Trajectory trajectory;
};

/// Parses a CSV written by export_trajectory. State columns are everything
/// between `t` and the aux columns V, h1, h2, residual.
CsvTrajectory read_trajectory_csv(std::istream& in);
CsvTrajectory read_trajectory_csv_file(const std::string& path);

/// Executes one configured run, writing <out>.trajectory.csv and
/// <out>.report.txt. Returns the exit status; log receives a short summary.
int run(const RunConfig& cfg, std::ostream& log);

/// Full command-line entry point (argument parsing included).
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace saddleflow::cli
