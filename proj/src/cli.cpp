#include "saddleflow/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "CLI11.hpp"
#include "saddleflow/builtins.hpp"
#include "saddleflow/certificates.hpp"
#include "saddleflow/control.hpp"
#include "saddleflow/distributed.hpp"
#include "saddleflow/errors.hpp"
#include "saddleflow/lp.hpp"
#include "saddleflow/reference.hpp"

namespace saddleflow::cli {

int exit_code(StopTag tag) {
  switch (tag) {
    case StopTag::Converged:
      return kExitConverged;
    case StopTag::HorizonReached:
      return kExitHorizon;
    case StopTag::Diverged:
    case StopTag::InnerFailure:
      return kExitDiverged;
  }
  return kExitUsage;
}

IntegratorConfig RunConfig::integrator() const {
  IntegratorConfig c;
  c.scheme = scheme;
  c.dt = dt;
  c.t_max = t_max;
  c.conv_tol = tol;
  c.conv_window = conv_window;
  c.record_stride = record_stride;
  c.validate();
  return c;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size()) {
    throw ParseError("config key '" + key + "': malformed number '" + v + "'");
  }
  return out;
}

std::size_t parse_count(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || out == 0) {
    throw ParseError("config key '" + key + "': expected a positive integer, got '" + v + "'");
  }
  return out;
}

}  // namespace

void apply_config(std::istream& in, RunConfig& cfg) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '-', '_');
    if (val.empty()) throw ParseError("config key '" + key + "' has an empty value");
    if (key == "problem") {
      cfg.problem = val;
    } else if (key == "flow") {
      cfg.flow = val;
    } else if (key == "rho") {
      cfg.rho = parse_double(key, val);
    } else if (key == "scheme") {
      try {
        cfg.scheme = scheme_from_string(val);
      } catch (const InvalidArgument& e) {
        throw ParseError("config key 'scheme': " + std::string(e.what()));
      }
    } else if (key == "dt") {
      cfg.dt = parse_double(key, val);
    } else if (key == "t_max") {
      cfg.t_max = parse_double(key, val);
    } else if (key == "tol") {
      cfg.tol = parse_double(key, val);
    } else if (key == "conv_window") {
      cfg.conv_window = parse_count(key, val);
    } else if (key == "record_stride") {
      cfg.record_stride = parse_count(key, val);
    } else if (key == "out") {
      cfg.out = val;
    } else {
      throw ParseError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
}

void apply_config_file(const std::string& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open config file '" + path + "'");
  apply_config(in, cfg);
}

std::vector<std::string> CsvLayout::header() const {
  std::vector<std::string> h{"t"};
  auto block = [&](const std::string& p, std::size_t k) {
    for (std::size_t i = 1; i <= k; ++i) h.push_back(p + std::to_string(i));
  };
  block(primal_prefix, nx);
  block("z", nz);
  block("y", ny);
  block("w", nw);
  if (lyapunov) h.emplace_back("V");
  if (certificate) {
    h.emplace_back("h1");
    h.emplace_back("h2");
  }
  if (residual) h.emplace_back("residual");
  return h;
}

CsvLayout layout_for(const VectorField& field, bool lyapunov, bool certificate, bool residual) {
  CsvLayout l;
  l.nx = field.n;
  l.ny = field.m;
  if (is_augmented(field.kind)) {
    l.nz = field.n;
    l.nw = field.m;
  }
  if (field.kind == FlowKind::Proximal) l.primal_prefix = "z";
  l.lyapunov = lyapunov;
  l.certificate = certificate;
  l.residual = residual;
  return l;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const CsvLayout& layout) {
  if (traj.empty()) throw Error("cannot export an empty trajectory");
  const bool aux = layout.lyapunov || layout.certificate || layout.residual;
  if (aux && traj.aux.size() != traj.size()) throw Error("trajectory has no aux values to export");
  const auto header = layout.header();
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const Vec& s = traj.states[k];
    if (static_cast<std::size_t>(s.size()) != layout.state_dim()) {
      throw DimensionMismatch("trajectory state does not match the CSV layout");
    }
    fmt::print(out, "{:.17g}", traj.times[k]);
    for (Eigen::Index i = 0; i < s.size(); ++i) fmt::print(out, ",{:.17g}", s[i]);
    if (aux) {
      const AuxSample& a = traj.aux[k];
      if (layout.lyapunov) fmt::print(out, ",{:.17g}", a.lyapunov);
      if (layout.certificate) fmt::print(out, ",{:.17g},{:.17g}", a.h1, a.h2);
      if (layout.residual) fmt::print(out, ",{:.17g}", a.residual);
    }
    out << '\n';
  }
}

void export_trajectory(const Trajectory& traj, const CsvLayout& layout, const std::string& path) {
  if (traj.empty()) throw Error("cannot export an empty trajectory");
  std::ofstream out(path);
  if (!out) throw Error("cannot write trajectory file '" + path + "'");
  write_trajectory_csv(out, traj, layout);
  out.flush();
  if (!out) throw Error("failed while writing '" + path + "'");
}

CsvTrajectory read_trajectory_csv(std::istream& in) {
  CsvTrajectory out;
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty trajectory CSV");
  {
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) out.columns.push_back(col);
  }
  if (out.columns.empty() || out.columns.front() != "t") throw ParseError("CSV must start with column t");
  int iv = -1, ih1 = -1, ih2 = -1, ires = -1;
  std::size_t state_cols = 0;
  for (std::size_t i = 1; i < out.columns.size(); ++i) {
    const std::string& c = out.columns[i];
    if (c == "V") iv = static_cast<int>(i);
    else if (c == "h1") ih1 = static_cast<int>(i);
    else if (c == "h2") ih2 = static_cast<int>(i);
    else if (c == "residual") ires = static_cast<int>(i);
    else ++state_cols;
  }
  const bool aux = iv >= 0 || ih1 >= 0 || ih2 >= 0 || ires >= 0;
  std::vector<double> row;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    row.clear();
    std::size_t pos = 0;
    while (pos <= line.size()) {
      const auto comma = std::min(line.find(',', pos), line.size());
      double v = 0.0;
      const auto [p, ec] = std::from_chars(line.data() + pos, line.data() + comma, v);
      if (ec != std::errc() || p != line.data() + comma) {
        throw ParseError("CSV line " + std::to_string(lineno) + ": malformed number");
      }
      row.push_back(v);
      pos = comma + 1;
    }
    if (row.size() != out.columns.size()) {
      throw ParseError("CSV line " + std::to_string(lineno) + " has " + std::to_string(row.size()) +
                       " fields, header has " + std::to_string(out.columns.size()));
    }
    Vec s(static_cast<Eigen::Index>(state_cols));
    for (std::size_t i = 0; i < state_cols; ++i) s[static_cast<Eigen::Index>(i)] = row[1 + i];
    out.trajectory.times.push_back(row[0]);
    out.trajectory.states.push_back(std::move(s));
    if (aux) {
      AuxSample a;
      if (iv >= 0) a.lyapunov = row[static_cast<std::size_t>(iv)];
      if (ih1 >= 0) a.h1 = row[static_cast<std::size_t>(ih1)];
      if (ih2 >= 0) a.h2 = row[static_cast<std::size_t>(ih2)];
      if (ires >= 0) a.residual = row[static_cast<std::size_t>(ires)];
      out.trajectory.aux.push_back(a);
    }
  }
  return out;
}

CsvTrajectory read_trajectory_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return read_trajectory_csv(in);
}

namespace {

struct ResolvedProblem {
  std::string label;
  SaddleProblem problem;
  std::optional<PointPair> saddle;
  bool orthant = false;  // projected flows allowed
  std::optional<LinearProgram> lp;
  std::optional<ControlProblem> control;
  std::optional<ControlLp> control_lp;
};

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

ResolvedProblem resolve_problem(const std::string& spec) {
  ResolvedProblem r;
  r.label = spec;
  for (const auto& b : builtin_problems()) {
    if (b.name == spec) {
      r.problem = b.problem;
      r.saddle = b.saddle;
      r.orthant = b.saddle.has_value() && (b.saddle->y.size() == 0 || b.saddle->y.minCoeff() >= 0.0);
      r.lp = b.lp;
      return r;
    }
  }
  std::string path = spec;
  bool control = ends_with(spec, ".ctl") || ends_with(spec, ".control");
  if (spec.rfind("lp:", 0) == 0) {
    path = spec.substr(3);
    control = false;
  } else if (spec.rfind("control:", 0) == 0) {
    path = spec.substr(8);
    control = true;
  } else {
    std::ifstream probe(spec);
    if (!probe) {
      throw ParseError("--problem: '" + spec + "' is neither a builtin (" +
                       fmt::format("{}", fmt::join(builtin_names(), ", ")) + ") nor a readable file");
    }
  }
  if (control) {
    r.control = read_control_file(path);
    r.control_lp = build_lp(*r.control);
    r.lp = r.control_lp->lp;
  } else {
    r.lp = read_lp_file(path);
  }
  r.problem = lagrangian(*r.lp);
  r.orthant = true;
  return r;
}

std::string vec_str(const Vec& v) {
  std::vector<std::string> parts;
  for (Eigen::Index i = 0; i < v.size(); ++i) parts.push_back(fmt::format("{:.10g}", v[i]));
  return "[" + fmt::format("{}", fmt::join(parts, ", ")) + "]";
}

Vec default_init(const VectorField& field) {
  // x (or z for the proximal state) starts at 1, everything else at 0.
  Vec s = Vec::Zero(static_cast<Eigen::Index>(field.dimension));
  s.head(static_cast<Eigen::Index>(field.n)).setOnes();
  return s;
}

struct Outcome {
  Trajectory trajectory;
  StopReason stop;
  VectorField field;
  std::string diagnostic;
};

void write_report(const std::string& path, const std::string& body) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write report file '" + path + "'");
  out << body;
  if (!out) throw Error("failed while writing '" + path + "'");
}

int run_reproduce(const RunConfig& cfg, std::ostream& log) {
  IntegratorConfig icfg = cfg.integrator();
  std::ostringstream rep;
  fmt::print(rep, "command: reproduce-paper\nrho: {}\nscheme: {}\ndt: {}\nt_max: {}\ntol: {}\n",
             kCaseRho, to_string(icfg.scheme), icfg.dt, icfg.t_max, icfg.conv_tol);
  std::optional<ReproductionResult> res;
  ReproductionDiagnostics diag;
  try {
    res = reproduce_paper_case(icfg);
    diag = res->diagnostics;
  } catch (const ReproductionFailure& e) {
    diag = e.diagnostics;
    fmt::print(rep, "error: {}\n", e.what());
  }
  const ControlLp& cl = diag.control_lp;
  VectorField field = projected_regularized_field(lagrangian(cl.lp), {kCaseRho});
  Trajectory traj = diag.run.trajectory;
  LyapunovReference ref{diag.run.solution.x, diag.run.solution.y, ReferenceSource::FlowLimit};
  MonitorContext ctx{lagrangian(cl.lp), field, ref, CertificateKind::Separable, {}};
  const MonitorReport mon = trajectory_monitor(ctx, traj);
  export_trajectory(traj, layout_for(field, true, true, true), cfg.out + ".trajectory.csv");

  fmt::print(rep, "stop: {}\ndetail: {}\nfinal_time: {:.6f}\nfinal_residual: {:.6e}\n",
             to_string(diag.stop.tag), diag.stop.detail, diag.stop.final_time,
             diag.stop.final_residual);
  fmt::print(rep, "terminal_h: {:.6e} {:.6e}\nmax_V_increase: {:.6e}\n", mon.terminal_h.h1,
             mon.terminal_h.h2, mon.max_lyapunov_increase);
  fmt::print(rep, "min_final_state_dual: {:.6e}\nruntime_seconds: {:.3f}\n", diag.min_final_dual,
             diag.seconds);
  bool within = false;
  if (res) {
    const PublishedSolution pub = published_solution();
    const auto x_lp = cl.map.states(diag.run.solution.x);
    for (std::size_t t = 0; t < res->solution.u.size(); ++t) {
      for (Eigen::Index i = 0; i < pub.u[t].size(); ++i) {
        fmt::print(rep, "u({})[{}]: computed {:.6f} published {:.4f} distance {:.3e}\n", t, i + 1,
                   res->solution.u[t][i], pub.u[t][i], diag.u_deviation[t][i]);
      }
    }
    for (std::size_t t = 0; t < x_lp.size(); ++t) {
      for (Eigen::Index i = 0; i < pub.x[t].size(); ++i) {
        fmt::print(rep, "x({})[{}]: computed {:.6f} published {:.4f} distance {:.3e}\n", t + 1, i + 1,
                   x_lp[t][i], pub.x[t][i], diag.x_deviation[t][i]);
      }
    }
    within = diag.max_deviation <= 1e-2;
    fmt::print(rep, "max_distance: {:.3e}\nwithin_1e-2: {}\nobjective: {:.6f}\nsplit_overlap: {:.3e}\n",
               diag.max_deviation, within ? "yes" : "no", res->solution.objective,
               diag.max_split_overlap);
  }
  write_report(cfg.out + ".report.txt", rep.str());
  log << rep.str();
  if (!res) return exit_code(diag.stop.tag == StopTag::Converged ? StopTag::HorizonReached : diag.stop.tag);
  return within ? kExitConverged : kExitHorizon;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& log) {
  if (cfg.command == "reproduce-paper") return run_reproduce(cfg, log);

  const IntegratorConfig icfg = cfg.integrator();
  const RegularizationConfig reg{cfg.rho};
  reg.validate();
  ResolvedProblem rp = resolve_problem(cfg.problem);

  std::string flow = cfg.flow;
  if (cfg.command == "solve-lp") flow = "projected-regularized";
  if (cfg.command == "distributed-lp") flow = "distributed";
  if ((cfg.command == "solve-lp" || cfg.command == "distributed-lp") && !rp.lp) {
    throw ParseError("--problem: command '" + cfg.command + "' needs an LP or control file");
  }
  const bool distributed = flow == "distributed";
  if (distributed && !rp.lp) throw ParseError("--flow: 'distributed' needs an LP or control file");
  const FlowKind kind = distributed ? FlowKind::ProjectedRegularized : [&] {
    try {
      return flow_kind_from_string(flow);
    } catch (const InvalidArgument& e) {
      throw ParseError(std::string("--flow: ") + e.what());
    }
  }();
  if (is_projected(kind) && !rp.orthant) {
    throw ParseError("--flow: projected flows need an LP or a problem with a nonnegative dual orthant");
  }

  Outcome oc;
  switch (kind) {
    case FlowKind::Plain:
      oc.field = plain_field(rp.problem);
      break;
    case FlowKind::Regularized:
      oc.field = regularized_field(rp.problem, reg);
      break;
    case FlowKind::Projected:
      oc.field = projected_field(rp.problem);
      break;
    case FlowKind::ProjectedRegularized:
      oc.field = projected_regularized_field(rp.problem, reg);
      break;
    case FlowKind::Proximal:
      oc.field = proximal_field(rp.problem);
      break;
  }

  std::optional<LpSolveResult> lp_result;
  if (distributed) {
    DistributedRun d = run_distributed(*rp.lp, reg, icfg);
    oc.trajectory = std::move(d.trajectory);
    oc.stop = d.stop;
    oc.diagnostic = fmt::format("{} synchronous rounds", d.rounds);
  } else if (rp.lp && kind == FlowKind::ProjectedRegularized) {
    lp_result = solve(*rp.lp, reg, icfg);
    oc.trajectory = lp_result->trajectory;
    oc.stop = lp_result->stop;
    oc.diagnostic = lp_result->diagnostic;
  } else {
    Vec init = rp.lp ? Vec::Zero(static_cast<Eigen::Index>(oc.field.dimension)) : default_init(oc.field);
    IntegrationResult r = integrate(oc.field, init, icfg);
    oc.trajectory = std::move(r.trajectory);
    oc.stop = r.stop;
  }

  // Lyapunov reference: the known saddle, the enumeration oracle, or the
  // final state as a last resort.
  std::optional<LyapunovReference> ref;
  std::string ref_note;
  if (rp.saddle) {
    ref = LyapunovReference{rp.saddle->x, rp.saddle->y, ReferenceSource::UserSupplied};
  } else if (rp.lp) {
    try {
      const ReferenceSolution rs = reference_solve(*rp.lp);
      if (rs.status == LpStatus::Optimal) {
        ref = LyapunovReference{rs.x, rs.y, ReferenceSource::OracleSolver};
      } else {
        ref_note = std::string("reference oracle: ") + to_string(rs.status);
      }
    } catch (const UnsupportedScale& e) {
      ref_note = e.what();
    }
  }
  if (!ref && oc.stop.tag == StopTag::Converged) {
    const PointPair last = split_state(oc.field, oc.trajectory.final_state());
    if (is_augmented(kind)) {
      const AugmentedState st = AugmentedState::unpack(oc.trajectory.final_state(), oc.field.n, oc.field.m);
      ref = LyapunovReference{st.x, st.y, ReferenceSource::FlowLimit};
    } else {
      ref = LyapunovReference{last.x, last.y, ReferenceSource::FlowLimit};
    }
  }

  CertificateKind cert = CertificateKind::None;
  if (is_augmented(kind)) {
    cert = CertificateKind::Separable;
  } else if (kind == FlowKind::Proximal && rp.problem.has_value()) {
    cert = CertificateKind::Proximal;
  } else if (rp.problem.convexity == ConvexityClass::StrictlyConvexConcave && rp.problem.has_value()) {
    cert = CertificateKind::Strict;
  }

  MonitorReport mon;
  if (ref) {
    MonitorContext ctx{rp.problem, oc.field, *ref, cert, {}};
    mon = trajectory_monitor(ctx, oc.trajectory);
  } else {
    cert = CertificateKind::None;
    for (const Vec& s : oc.trajectory.states) {
      AuxSample a;
      a.residual = oc.field(s).norm();
      oc.trajectory.aux.push_back(a);
    }
    mon.terminal_residual = oc.trajectory.aux.back().residual;
  }
  const bool has_h = cert != CertificateKind::None;
  export_trajectory(oc.trajectory, layout_for(oc.field, ref.has_value(), has_h, true),
                    cfg.out + ".trajectory.csv");

  std::ostringstream rep;
  fmt::print(rep, "command: {}\nproblem: {}\nflow: {}\nrho: {}\nscheme: {}\ndt: {}\nt_max: {}\ntol: {}\n",
             cfg.command, rp.label, flow, cfg.rho, to_string(icfg.scheme), icfg.dt, icfg.t_max,
             icfg.conv_tol);
  fmt::print(rep, "stop: {}\ndetail: {}\n", to_string(oc.stop.tag), oc.stop.detail);
  if (!oc.diagnostic.empty()) fmt::print(rep, "diagnostic: {}\n", oc.diagnostic);
  fmt::print(rep, "final_time: {:.6f}\nfinal_residual: {:.6e}\nsamples: {}\n", oc.stop.final_time,
             oc.stop.final_residual, oc.trajectory.size());
  if (ref) {
    fmt::print(rep, "reference: {} x* = {} y* = {}\n", to_string(ref->source), vec_str(ref->x_star),
               vec_str(ref->y_star));
    fmt::print(rep, "V_initial: {:.6e}\nV_final: {:.6e}\nmax_V_increase: {:.6e}\n",
               mon.initial_lyapunov, mon.terminal_lyapunov, mon.max_lyapunov_increase);
  } else if (!ref_note.empty()) {
    fmt::print(rep, "reference: none ({})\n", ref_note);
  }
  fmt::print(rep, "certificate: {}\n", to_string(cert));
  if (has_h) fmt::print(rep, "final_h: {:.6e} {:.6e}\n", mon.terminal_h.h1, mon.terminal_h.h2);
  const Vec& last = oc.trajectory.final_state();
  fmt::print(rep, "final_state: {}\n", vec_str(last));
  if (rp.lp) {
    PointPair sol;
    if (lp_result) {
      sol = lp_result->solution;
    } else if (is_augmented(kind)) {
      const AugmentedState st = AugmentedState::unpack(last, rp.lp->n(), rp.lp->m());
      sol = PointPair{st.x, st.y};
    } else {
      sol = split_state(oc.field, last);
    }
    const KktResiduals kkt = kkt_residuals(*rp.lp, sol);
    fmt::print(rep, "x: {}\ny: {}\nobjective: {:.10g}\n", vec_str(sol.x), vec_str(sol.y),
               rp.lp->objective(sol.x));
    fmt::print(rep, "kkt_stationarity: {:.3e}\nkkt_primal_infeasibility: {:.3e}\n"
               "kkt_dual_infeasibility: {:.3e}\nkkt_complementarity: {:.3e}\n",
               kkt.stationarity, kkt.primal_infeasibility, kkt.dual_infeasibility, kkt.complementarity);
    if (rp.control) {
      const ControlSolution cs = recover_solution(*rp.control, rp.control_lp->map, sol.x);
      for (std::size_t t = 0; t < cs.u.size(); ++t) fmt::print(rep, "u({}): {}\n", t, vec_str(cs.u[t]));
      for (std::size_t t = 0; t < cs.x.size(); ++t) fmt::print(rep, "x({}): {}\n", t + 1, vec_str(cs.x[t]));
      fmt::print(rep, "control_objective: {:.10g}\n", cs.objective);
    }
  }
  write_report(cfg.out + ".report.txt", rep.str());
  log << rep.str();
  return exit_code(oc.stop.tag);
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Saddle flow dynamics solver"};
  app.require_subcommand(0, 1);
  RunConfig cfg;
  std::string config_path;
  std::string scheme = "rk4";

  auto add_common = [&](CLI::App* sub, bool with_problem, bool with_flow) {
    if (with_problem) {
      sub->add_option("--problem", cfg.problem,
                      "builtin name, lp:<file>, control:<file>, or a file path");
    }
    if (with_flow) {
      sub->add_option("--flow", cfg.flow,
                      "plain | regularized | projected | projected-regularized | proximal | distributed");
    }
    sub->add_option("--rho", cfg.rho, "regularization coefficient (> 0)");
    sub->add_option("--scheme", scheme, "euler | rk4");
    sub->add_option("--dt", cfg.dt, "time step");
    sub->add_option("--t-max", cfg.t_max, "integration horizon");
    sub->add_option("--tol", cfg.tol, "convergence threshold on the field norm");
    sub->add_option("--conv-window", cfg.conv_window, "consecutive recorded samples below tol");
    sub->add_option("--record-stride", cfg.record_stride, "record every k-th step");
    sub->add_option("--out", cfg.out, "output prefix for .trajectory.csv and .report.txt");
    sub->add_option("--config", config_path, "key=value file; its values override flags");
  };
  CLI::App* run_cmd = app.add_subcommand("run", "integrate a saddle flow");
  add_common(run_cmd, true, true);
  CLI::App* solve_cmd = app.add_subcommand("solve-lp", "solve an LP with the projected regularized flow");
  add_common(solve_cmd, true, false);
  CLI::App* dist_cmd = app.add_subcommand("distributed-lp", "solve an LP with synchronous agent rounds");
  add_common(dist_cmd, true, false);
  CLI::App* repro_cmd = app.add_subcommand("reproduce-paper", "solve the two-agent optimal control case");
  add_common(repro_cmd, false, false);
  // Flags without a subcommand behave like `run`.
  add_common(&app, true, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitConverged;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  for (CLI::App* sub : {run_cmd, solve_cmd, dist_cmd, repro_cmd}) {
    if (sub->parsed()) cfg.command = sub->get_name();
  }

  try {
    cfg.scheme = scheme_from_string(scheme);
  } catch (const InvalidArgument& e) {
    err << "error: --scheme: " << e.what() << '\n';
    return kExitUsage;
  }
  if (cfg.command == "reproduce-paper") {
    // Defaults chosen to reproduce the published case within a minute.
    if (repro_cmd->count("--rho") > 0 && cfg.rho != kCaseRho) {
      err << "warning: reproduce-paper always uses rho = " << kCaseRho << '\n';
    }
    if (cfg.out == "saddleflow") cfg.out = "reproduce";
  }
  try {
    if (!config_path.empty()) apply_config_file(config_path, cfg);
    return run(cfg, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace saddleflow::cli
