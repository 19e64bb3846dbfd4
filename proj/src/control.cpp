#include "saddleflow/control.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <string>

#include <fmt/format.h>

#include "saddleflow/errors.hpp"

namespace saddleflow {

void ControlProblem::validate() const {
  const auto n = x0.size();
  if (n == 0) throw InvalidArgument("control problem needs at least one agent");
  if (horizon < 1) throw InvalidArgument("control horizon T must be >= 1");
  if (g.rows() != n || g.cols() != n) throw InvalidArgument("G must be N x N");
  if (h.rows() != n || h.cols() != n) throw InvalidArgument("H must be N x N");
  if (d.cols() != n || d.rows() != dv.size()) throw InvalidArgument("D must be M x N with d of length M");
}

std::size_t VariableMap::x_plus(std::size_t t, std::size_t i) const {
  return (t - 1) * n_agents + i;
}
std::size_t VariableMap::x_minus(std::size_t t, std::size_t i) const {
  return block() + (t - 1) * n_agents + i;
}
std::size_t VariableMap::u_plus(std::size_t t, std::size_t i) const {
  return 2 * block() + t * n_agents + i;
}
std::size_t VariableMap::u_minus(std::size_t t, std::size_t i) const {
  return 3 * block() + t * n_agents + i;
}

std::vector<Vec> VariableMap::states(const Vec& v) const {
  std::vector<Vec> out;
  for (std::size_t t = 1; t <= horizon; ++t) {
    Vec x(static_cast<Eigen::Index>(n_agents));
    for (std::size_t i = 0; i < n_agents; ++i) {
      x[static_cast<Eigen::Index>(i)] = v[static_cast<Eigen::Index>(x_plus(t, i))] -
                                        v[static_cast<Eigen::Index>(x_minus(t, i))];
    }
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<Vec> VariableMap::controls(const Vec& v) const {
  std::vector<Vec> out;
  for (std::size_t t = 0; t < horizon; ++t) {
    Vec u(static_cast<Eigen::Index>(n_agents));
    for (std::size_t i = 0; i < n_agents; ++i) {
      u[static_cast<Eigen::Index>(i)] = v[static_cast<Eigen::Index>(u_plus(t, i))] -
                                        v[static_cast<Eigen::Index>(u_minus(t, i))];
    }
    out.push_back(std::move(u));
  }
  return out;
}

std::vector<std::string> VariableMap::variable_names() const {
  std::vector<std::string> names(variables());
  for (std::size_t i = 0; i < n_agents; ++i) {
    const std::string a = std::to_string(i + 1);
    for (std::size_t t = 1; t <= horizon; ++t) {
      names[x_plus(t, i)] = "xp" + std::to_string(t) + "_" + a;
      names[x_minus(t, i)] = "xm" + std::to_string(t) + "_" + a;
    }
    for (std::size_t t = 0; t < horizon; ++t) {
      names[u_plus(t, i)] = "up" + std::to_string(t) + "_" + a;
      names[u_minus(t, i)] = "um" + std::to_string(t) + "_" + a;
    }
  }
  return names;
}

ControlLp build_lp(const ControlProblem& cp) {
  cp.validate();
  const std::size_t n = cp.agents();
  const std::size_t horizon = cp.horizon;
  const std::size_t rows_m = cp.final_rows();
  VariableMap map;
  map.n_agents = n;
  map.horizon = horizon;
  const std::size_t nt = map.block();
  const std::size_t nvar = map.variables();
  map.dynamics_rows = 0;
  map.final_row_begin = 2 * nt;
  map.final_row_count = rows_m;
  map.nonneg_row_begin = 2 * nt + rows_m;
  const std::size_t nrow = map.nonneg_row_begin + nvar;

  LinearProgram lp{Vec::Ones(static_cast<Eigen::Index>(nvar)),
                   Mat::Zero(static_cast<Eigen::Index>(nrow), static_cast<Eigen::Index>(nvar)),
                   Vec::Zero(static_cast<Eigen::Index>(nrow))};
  auto at = [&](std::size_t r, std::size_t c) -> double& {
    return lp.a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  };

  const Vec gx0 = cp.g * cp.x0;
  for (std::size_t t = 0; t < horizon; ++t) {
    for (std::size_t k = 0; k < n; ++k) {
      // e = x(t+1)_k - (G x(t))_k - (H u(t))_k, with x(0) moved to the right.
      const std::size_t r = t * n + k;
      const std::size_t rn = nt + r;
      auto put = [&](std::size_t col, double v) {
        at(r, col) += v;
        at(rn, col) -= v;
      };
      put(map.x_plus(t + 1, k), 1.0);
      put(map.x_minus(t + 1, k), -1.0);
      for (std::size_t i = 0; i < n; ++i) {
        const double gki = cp.g(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i));
        const double hki = cp.h(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i));
        if (t > 0 && gki != 0.0) {
          put(map.x_plus(t, i), -gki);
          put(map.x_minus(t, i), gki);
        }
        if (hki != 0.0) {
          put(map.u_plus(t, i), -hki);
          put(map.u_minus(t, i), hki);
        }
      }
      const double rhs = t == 0 ? gx0[static_cast<Eigen::Index>(k)] : 0.0;
      lp.b[static_cast<Eigen::Index>(r)] = rhs;
      lp.b[static_cast<Eigen::Index>(rn)] = -rhs;
    }
  }
  for (std::size_t r = 0; r < rows_m; ++r) {
    for (std::size_t i = 0; i < n; ++i) {
      const double dri = cp.d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i));
      at(map.final_row_begin + r, map.x_plus(horizon, i)) = dri;
      at(map.final_row_begin + r, map.x_minus(horizon, i)) = -dri;
    }
    lp.b[static_cast<Eigen::Index>(map.final_row_begin + r)] = cp.dv[static_cast<Eigen::Index>(r)];
  }
  for (std::size_t v = 0; v < nvar; ++v) at(map.nonneg_row_begin + v, v) = -1.0;
  return {std::move(lp), map};
}

std::vector<Vec> simulate(const ControlProblem& cp, const std::vector<Vec>& u) {
  cp.validate();
  if (u.size() != cp.horizon) {
    throw DimensionMismatch("expected " + std::to_string(cp.horizon) + " control inputs, got " +
                            std::to_string(u.size()));
  }
  std::vector<Vec> out;
  Vec x = cp.x0;
  for (const Vec& ut : u) {
    if (ut.size() != cp.x0.size()) throw DimensionMismatch("control input has the wrong length");
    x = cp.g * x + cp.h * ut;
    out.push_back(x);
  }
  return out;
}

double control_objective(const std::vector<Vec>& x, const std::vector<Vec>& u) {
  double s = 0.0;
  for (const Vec& v : x) s += v.lpNorm<1>();
  for (const Vec& v : u) s += v.lpNorm<1>();
  return s;
}

ControlSolution recover_solution(const ControlProblem& cp, const VariableMap& map, const Vec& lp_x) {
  ControlSolution sol;
  sol.u = map.controls(lp_x);
  sol.x = simulate(cp, sol.u);
  sol.objective = control_objective(sol.x, sol.u);
  return sol;
}

namespace {

double read_real(std::istream& in, const std::string& what) {
  std::string tok;
  if (!(in >> tok)) throw ParseError("unexpected end of input while reading " + what);
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw ParseError("malformed number '" + tok + "' in " + what);
    return v;
  } catch (const std::logic_error&) {
    throw ParseError("malformed number '" + tok + "' in " + what);
  }
}

std::size_t read_size(std::istream& in, const std::string& what) {
  const double v = read_real(in, what);
  if (v < 0 || v != std::floor(v)) throw ParseError(what + " must be a nonnegative integer");
  return static_cast<std::size_t>(v);
}

void read_matrix(std::istream& in, Mat& m, const std::string& name) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      m(r, c) = read_real(in, name + "[" + std::to_string(r + 1) + "," + std::to_string(c + 1) + "]");
    }
  }
}

}  // namespace

ControlProblem read_control(std::istream& in) {
  const std::size_t n = read_size(in, "N");
  const std::size_t m = read_size(in, "M");
  const std::size_t t = read_size(in, "T");
  if (n < 1) throw ParseError("N must be >= 1");
  if (t < 1) throw ParseError("T must be >= 1");
  const auto ni = static_cast<Eigen::Index>(n);
  const auto mi = static_cast<Eigen::Index>(m);
  ControlProblem cp{Mat(ni, ni), Mat(ni, ni), Mat(mi, ni), Vec(mi), Vec(ni), t};
  read_matrix(in, cp.g, "G");
  read_matrix(in, cp.h, "H");
  read_matrix(in, cp.d, "D");
  for (Eigen::Index r = 0; r < mi; ++r) cp.dv[r] = read_real(in, "d[" + std::to_string(r + 1) + "]");
  for (Eigen::Index i = 0; i < ni; ++i) cp.x0[i] = read_real(in, "x0[" + std::to_string(i + 1) + "]");
  std::string extra;
  if (in >> extra) throw ParseError("trailing token '" + extra + "' after control data");
  cp.validate();
  return cp;
}

ControlProblem read_control_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open control file '" + path + "'");
  return read_control(in);
}

ControlProblem two_agent_instance() {
  ControlProblem cp{Mat(2, 2), Mat(2, 2), Mat(1, 2), Vec(1), Vec(2), 2};
  cp.g << 1.1, 0.0, -0.7, 1.1;
  cp.h << 1.5, 0.0, 0.0, 0.0;
  cp.d << 1.0, 1.5;
  cp.dv << 3.0;
  cp.x0 << 6.0, 10.0;
  return cp;
}

PublishedSolution published_solution() {
  PublishedSolution s;
  s.u = {Vec(2), Vec(2)};
  s.x = {Vec(2), Vec(2)};
  s.u[0] << 0.8190, 0.0;
  s.u[1] << -5.7410, 0.0;
  s.x[0] << 7.8286, 6.8000;
  s.x[1] << 0.0, 2.0000;
  return s;
}

ReproductionResult reproduce_paper_case(const IntegratorConfig& icfg) {
  const auto start = std::chrono::steady_clock::now();
  const ControlProblem cp = two_agent_instance();
  ReproductionDiagnostics diag;
  diag.control_lp = build_lp(cp);
  const LinearProgram& lp = diag.control_lp.lp;
  const VariableMap& map = diag.control_lp.map;
  diag.run = solve(lp, {kCaseRho}, icfg);
  diag.stop = diag.run.stop;

  // Final-state duals, identified by row role.
  const auto n = static_cast<Eigen::Index>(lp.n());
  diag.min_final_dual = std::numeric_limits<double>::infinity();
  for (const Vec& s : diag.run.trajectory.states) {
    for (std::size_t r = 0; r < map.final_row_count; ++r) {
      const double y = s[2 * n + static_cast<Eigen::Index>(map.final_row_begin + r)];
      diag.min_final_dual = std::min(diag.min_final_dual, y);
    }
  }
  diag.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!diag.run.converged()) {
    const std::string msg =
        fmt::format("reproduction did not converge: {} [{}, t = {:g}, residual {:.3e}]",
                    diag.run.diagnostic, to_string(diag.stop.tag), diag.stop.final_time,
                    diag.stop.final_residual);
    throw ReproductionFailure(msg, std::move(diag));
  }

  const Vec& v = diag.run.solution.x;
  ReproductionResult res;
  res.solution = recover_solution(cp, map, v);
  diag.lp_objective = lp.objective(v);
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(map.block()); ++i) {
    const auto nt = static_cast<Eigen::Index>(map.block());
    diag.max_split_overlap = std::max(diag.max_split_overlap, std::min(v[i], v[nt + i]));
    diag.max_split_overlap = std::max(diag.max_split_overlap, std::min(v[2 * nt + i], v[3 * nt + i]));
  }
  const PublishedSolution pub = published_solution();
  const std::vector<Vec> x_lp = map.states(v);
  for (std::size_t t = 0; t < cp.horizon; ++t) {
    diag.u_deviation.push_back((res.solution.u[t] - pub.u[t]).cwiseAbs());
    diag.x_deviation.push_back((x_lp[t] - pub.x[t]).cwiseAbs());
    diag.max_deviation = std::max({diag.max_deviation, diag.u_deviation.back().maxCoeff(),
                                   diag.x_deviation.back().maxCoeff()});
  }
  res.diagnostics = std::move(diag);
  return res;
}

}  // namespace saddleflow
