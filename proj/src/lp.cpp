#include "saddleflow/lp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "saddleflow/errors.hpp"

namespace saddleflow {

void LinearProgram::validate() const {
  if (c.size() == 0) throw InvalidArgument("linear program needs at least one variable");
  if (a.rows() != b.size() || a.cols() != c.size()) {
    throw InvalidArgument("constraint matrix is " + std::to_string(a.rows()) + "x" +
                          std::to_string(a.cols()) + ", expected " + std::to_string(b.size()) +
                          "x" + std::to_string(c.size()));
  }
  if (!c.allFinite() || !a.allFinite() || !b.allFinite()) {
    throw InvalidArgument("linear program has non-finite entries");
  }
}

double column_dot(const Mat& a, Eigen::Index col, const Vec& y) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.rows(); ++j) s += a(j, col) * y[j];
  return s;
}

double row_dot(const Mat& a, Eigen::Index row, const Vec& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.cols(); ++i) s += a(row, i) * x[i];
  return s;
}

SaddleProblem lagrangian(const LinearProgram& lp) {
  lp.validate();
  SaddleProblem p;
  p.n = lp.n();
  p.m = lp.m();
  p.convexity = ConvexityClass::Bilinear;
  p.name = "lp-lagrangian";
  p.value = [lp](const Vec& x, const Vec& y) {
    double s = lp.c.dot(x);
    for (Eigen::Index j = 0; j < lp.a.rows(); ++j) s += y[j] * (row_dot(lp.a, j, x) - lp.b[j]);
    return s;
  };
  p.grad_x = [lp](const Vec&, const Vec& y) {
    Vec g(lp.c.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = lp.c[i] + column_dot(lp.a, i, y);
    return g;
  };
  p.grad_y = [lp](const Vec& x, const Vec&) {
    Vec g(lp.b.size());
    for (Eigen::Index j = 0; j < g.size(); ++j) g[j] = row_dot(lp.a, j, x) - lp.b[j];
    return g;
  };
  return p;
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

long read_count(std::istream& in, const std::string& what) {
  const double v = read_real(in, what);
  if (v < 0 || v != std::floor(v)) throw ParseError(what + " must be a nonnegative integer");
  return static_cast<long>(v);
}

}  // namespace

LinearProgram read_lp(std::istream& in) {
  const long n = read_count(in, "n");
  const long m = read_count(in, "m");
  if (n < 1) throw ParseError("n must be >= 1");
  LinearProgram lp{Vec(n), Mat(m, n), Vec(m)};
  for (long i = 0; i < n; ++i) lp.c[i] = read_real(in, "c[" + std::to_string(i + 1) + "]");
  for (long j = 0; j < m; ++j) {
    for (long i = 0; i < n; ++i) {
      lp.a(j, i) = read_real(in, "A[" + std::to_string(j + 1) + "," + std::to_string(i + 1) + "]");
    }
    lp.b[j] = read_real(in, "b[" + std::to_string(j + 1) + "]");
  }
  std::string extra;
  if (in >> extra) throw ParseError("trailing token '" + extra + "' after LP data");
  lp.validate();
  return lp;
}

LinearProgram read_lp_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open LP file '" + path + "'");
  return read_lp(in);
}

void write_lp(std::ostream& out, const LinearProgram& lp) {
  const auto old = out.precision(17);
  out << lp.n() << ' ' << lp.m() << '\n';
  for (Eigen::Index i = 0; i < lp.c.size(); ++i) out << (i ? " " : "") << lp.c[i];
  out << '\n';
  for (Eigen::Index j = 0; j < lp.a.rows(); ++j) {
    for (Eigen::Index i = 0; i < lp.a.cols(); ++i) out << lp.a(j, i) << ' ';
    out << lp.b[j] << '\n';
  }
  out.precision(old);
}

KktResiduals kkt_residuals(const LinearProgram& lp, const PointPair& p) {
  KktResiduals r;
  const Vec slack = lp.a * p.x - lp.b;
  r.stationarity = (lp.c + lp.a.transpose() * p.y).norm();
  r.primal_infeasibility = slack.size() ? std::max(0.0, slack.maxCoeff()) : 0.0;
  r.dual_infeasibility = p.y.size() ? std::max(0.0, -p.y.minCoeff()) : 0.0;
  r.complementarity = std::abs(p.y.dot(slack));
  return r;
}

bool looks_ballistic(const Trajectory& traj, const VectorField& field) {
  if (traj.size() < 3) return false;
  const std::size_t mid = traj.size() / 2;
  const double span = traj.times.back() - traj.times[mid];
  if (!(span > 0.0)) return false;
  const double r_mid = field(traj.states[mid]).norm();
  const double r_end = field(traj.final_state()).norm();
  const double moved = (traj.final_state() - traj.states[mid]).norm();
  // Escaping states travel a distance comparable to their own size; a slow
  // creep along a degenerate optimal face does not.
  return r_end > 0.0 && r_end >= 0.9 * r_mid && moved >= 0.5 * r_end * span &&
         moved >= 0.25 * traj.states[mid].norm();
}

LpSolveResult solve(const LinearProgram& lp, const RegularizationConfig& cfg,
                    const IntegratorConfig& icfg, const std::optional<AugmentedState>& init,
                    double extract_tol) {
  lp.validate();
  cfg.validate();
  const SaddleProblem prob = lagrangian(lp);
  const VectorField field = projected_regularized_field(prob, cfg);
  const AugmentedState start = init.value_or(AugmentedState::zeros(lp.n(), lp.m()));
  if (start.x.size() != lp.c.size() || start.z.size() != lp.c.size() ||
      start.y.size() != lp.b.size() || start.w.size() != lp.b.size()) {
    throw DimensionMismatch("initial augmented state does not match the LP dimensions");
  }
  if ((start.y.size() && start.y.minCoeff() < 0.0) || (start.w.size() && start.w.minCoeff() < 0.0)) {
    throw InvalidInit("initial y and w must be nonnegative");
  }

  IntegrationResult run = integrate(field, start.pack(), icfg);
  LpSolveResult res;
  res.trajectory = std::move(run.trajectory);
  res.stop = std::move(run.stop);
  const AugmentedState last = AugmentedState::unpack(res.trajectory.final_state(), lp.n(), lp.m());
  res.solution = {last.x, last.y};

  switch (res.stop.tag) {
    case StopTag::Converged:
      try {
        res.solution = extract_original_saddle(last, extract_tol);
        res.diagnostic = "optimal";
      } catch (const NotConverged& e) {
        res.stop.tag = StopTag::HorizonReached;
        res.diagnostic = e.what();
      }
      break;
    case StopTag::Diverged:
      res.diagnostic = "diverged: the LP is likely unbounded or infeasible (" + res.stop.detail + ")";
      break;
    case StopTag::HorizonReached:
      if (looks_ballistic(res.trajectory, field)) {
        res.stop.tag = StopTag::Diverged;
        res.stop.detail = "state drifting without settling: " + res.stop.detail;
        res.diagnostic = "diverged: the LP is likely unbounded or infeasible (no finite saddle)";
      } else {
        res.diagnostic = "not converged within the horizon";
      }
      break;
    case StopTag::InnerFailure:
      res.diagnostic = res.stop.detail;
      break;
  }
  res.objective = lp.objective(res.solution.x);
  return res;
}

}  // namespace saddleflow
