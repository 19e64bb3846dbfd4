#include "saddleflow/certificates.hpp"

#include <algorithm>
#include <limits>

#include "saddleflow/errors.hpp"

namespace saddleflow {

const char* to_string(ReferenceSource s) {
  switch (s) {
    case ReferenceSource::OracleSolver:
      return "oracle-solver";
    case ReferenceSource::UserSupplied:
      return "user-supplied";
    case ReferenceSource::FlowLimit:
      return "flow-limit";
  }
  return "unknown";
}

const char* to_string(CertificateKind k) {
  switch (k) {
    case CertificateKind::None:
      return "none";
    case CertificateKind::Strict:
      return "strict";
    case CertificateKind::Separable:
      return "separable";
    case CertificateKind::Proximal:
      return "proximal";
  }
  return "unknown";
}

LyapunovReference oracle_reference(const SaddleProblem& prob, const PointPair& p) {
  const double r = stationarity_residual(prob, p);
  if (!(r <= 1e-6)) {
    throw InvalidArgument("oracle reference has stationarity residual " + std::to_string(r) +
                          " above 1e-6");
  }
  return {p.x, p.y, ReferenceSource::OracleSolver};
}

double lyapunov_value(const LyapunovReference& ref, const PointPair& p) {
  if (ref.x_star.size() != p.x.size() || ref.y_star.size() != p.y.size()) {
    throw DimensionMismatch("Lyapunov reference and point differ in dimension");
  }
  return 0.5 * (p.x - ref.x_star).squaredNorm() + 0.5 * (p.y - ref.y_star).squaredNorm();
}

CertificateValue saddle_gap(const SaddleProblem& prob, const LyapunovReference& ref,
                            const PointPair& p) {
  if (!prob.has_value()) {
    throw UnsupportedOperation("saddle gap of '" + prob.name + "' needs a value oracle");
  }
  check_dimensions(prob, p);
  check_dimensions(prob, ref.point());
  const double s_star = prob.value(ref.x_star, ref.y_star);
  return {s_star - prob.value(ref.x_star, p.y), prob.value(p.x, ref.y_star) - s_star};
}

CertificateValue certificate_strict(const SaddleProblem& prob, const LyapunovReference& ref,
                                    const PointPair& p) {
  if (prob.convexity != ConvexityClass::StrictlyConvexConcave) {
    throw UnsupportedOperation("strict certificate needs a strictly convex-concave problem, '" +
                               prob.name + "' is " + to_string(prob.convexity));
  }
  return saddle_gap(prob, ref, p);
}

CertificateValue certificate_separable(const RegularizationConfig& cfg, const AugmentedState& st) {
  cfg.validate();
  if (st.x.size() != st.z.size() || st.y.size() != st.w.size()) {
    throw DimensionMismatch("virtual variables must match the original dimensions");
  }
  return {(st.y - st.w).squaredNorm() / (2.0 * cfg.rho),
          (st.x - st.z).squaredNorm() / (2.0 * cfg.rho)};
}

CertificateValue certificate_proximal(const SaddleProblem& prob, const LyapunovReference& ref,
                                      const Vec& z, const Vec& y, const ProximalOptions& opts) {
  const SaddleProblem sur = proximal_surrogate(prob, opts);
  if (!sur.has_value()) {
    throw UnsupportedOperation("proximal certificate of '" + prob.name + "' needs a value oracle");
  }
  check_dimensions(prob, {z, y});
  const double first = sur.value(ref.x_star, ref.y_star) - sur.value(ref.x_star, y);
  const Vec xb = proximal_inner_argmin(prob, z, ref.y_star, opts);
  return {first, 0.5 * (xb - z).squaredNorm()};
}

SandwichReport sandwich_check(const SaddleProblem& prob, const LyapunovReference& ref,
                              const PointPair& p, const CertificateValue& h, double slack) {
  SandwichReport r;
  r.h = h;
  r.slack = slack;
  r.bound = saddle_gap(prob, ref, p);
  r.worst_violation = std::max({0.0, -h.h1, -h.h2, h.h1 - r.bound.h1, h.h2 - r.bound.h2});
  return r;
}

PointPair split_state(const VectorField& field, const Vec& state) {
  if (static_cast<std::size_t>(state.size()) != field.dimension) {
    throw DimensionMismatch("state does not match the field dimension");
  }
  const auto p = static_cast<Eigen::Index>(is_augmented(field.kind) ? 2 * field.n : field.n);
  return {state.head(p), state.tail(state.size() - p)};
}

LyapunovReference state_reference(const MonitorContext& ctx) {
  if (!is_augmented(ctx.field.kind)) return ctx.reference;
  const AugmentedState lifted = AugmentedState::aligned(ctx.reference.point());
  LyapunovReference r = ctx.reference;
  r.x_star.resize(2 * lifted.x.size());
  r.x_star << lifted.x, lifted.z;
  r.y_star.resize(2 * lifted.y.size());
  r.y_star << lifted.y, lifted.w;
  return r;
}

double lyapunov_derivative(const MonitorContext& ctx, const Vec& state) {
  const LyapunovReference r = state_reference(ctx);
  Vec s_star(state.size());
  s_star << r.x_star, r.y_star;
  return (state - s_star).dot(ctx.field(state));
}

AuxSample evaluate_aux(const MonitorContext& ctx, const Vec& state) {
  AuxSample a;
  const PointPair p = split_state(ctx.field, state);
  a.lyapunov = lyapunov_value(state_reference(ctx), p);
  a.residual = ctx.field(state).norm();
  CertificateValue h;
  switch (ctx.certificate) {
    case CertificateKind::None:
      break;
    case CertificateKind::Strict:
      h = certificate_strict(ctx.problem, ctx.reference, p);
      break;
    case CertificateKind::Separable:
      h = certificate_separable({ctx.field.rho},
                                AugmentedState::unpack(state, ctx.field.n, ctx.field.m));
      break;
    case CertificateKind::Proximal:
      h = certificate_proximal(ctx.problem, ctx.reference, p.x, p.y, ctx.proximal);
      break;
  }
  a.h1 = h.h1;
  a.h2 = h.h2;
  return a;
}

void annotate(Trajectory& traj, const MonitorContext& ctx) {
  traj.aux.clear();
  traj.aux.reserve(traj.size());
  for (const Vec& s : traj.states) traj.aux.push_back(evaluate_aux(ctx, s));
}

MonitorReport trajectory_monitor(const MonitorContext& ctx, Trajectory& traj) {
  MonitorReport rep;
  if (traj.empty()) return rep;
  if (traj.aux.size() != traj.size()) annotate(traj, ctx);
  rep.samples = traj.size();
  rep.max_lyapunov_increase = -std::numeric_limits<double>::infinity();
  rep.max_lyapunov_derivative = -std::numeric_limits<double>::infinity();
  rep.min_h = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const AuxSample& a = traj.aux[k];
    if (k > 0) {
      rep.max_lyapunov_increase =
          std::max(rep.max_lyapunov_increase, a.lyapunov - traj.aux[k - 1].lyapunov);
    }
    rep.max_lyapunov_derivative =
        std::max(rep.max_lyapunov_derivative, lyapunov_derivative(ctx, traj.states[k]));
    rep.min_h = std::min({rep.min_h, a.h1, a.h2});
  }
  if (traj.size() == 1) rep.max_lyapunov_increase = 0.0;
  rep.initial_lyapunov = traj.aux.front().lyapunov;
  rep.terminal_lyapunov = traj.aux.back().lyapunov;
  rep.terminal_h = {traj.aux.back().h1, traj.aux.back().h2};
  rep.terminal_residual = traj.aux.back().residual;
  return rep;
}

}  // namespace saddleflow
