#pragma once

#include <optional>
#include <string>

#include "saddleflow/flows.hpp"
#include "saddleflow/integrate.hpp"
#include "saddleflow/problem.hpp"

namespace saddleflow {

enum class ReferenceSource { OracleSolver, UserSupplied, FlowLimit };

const char* to_string(ReferenceSource s);

/// The saddle point (x*, y*) a Lyapunov function is centred on.
struct LyapunovReference {
  Vec x_star;
  Vec y_star;
  ReferenceSource source = ReferenceSource::UserSupplied;

  [[nodiscard]] PointPair point() const { return {x_star, y_star}; }
};

/// Builds an oracle-solver reference; throws InvalidArgument if the
/// stationarity residual at the point exceeds 1e-6.
LyapunovReference oracle_reference(const SaddleProblem& prob, const PointPair& p);

struct CertificateValue {
  double h1 = 0.0;
  double h2 = 0.0;
};

/// |x - x*|^2 / 2 + |y - y*|^2 / 2
double lyapunov_value(const LyapunovReference& ref, const PointPair& p);

/// (S(x*, y*) - S(x*, y), S(x, y*) - S(x*, y*)): the saddle-gap vector.
CertificateValue saddle_gap(const SaddleProblem& prob, const LyapunovReference& ref,
                            const PointPair& p);

/// Strict convexity-concavity certificate: the saddle-gap vector itself.
/// Requires a value oracle and a strictly convex-concave problem.
CertificateValue certificate_strict(const SaddleProblem& prob, const LyapunovReference& ref,
                                    const PointPair& p);

/// (|y - w|^2 / (2 rho), |x - z|^2 / (2 rho)); the y-gap comes first.
CertificateValue certificate_separable(const RegularizationConfig& cfg, const AugmentedState& st);

/// (Sbar(z*, y*) - Sbar(z*, y), |xbar(z, y*) - z|^2 / 2) for the proximal
/// surrogate Sbar; ref is a saddle of Sbar over (z, y).
CertificateValue certificate_proximal(const SaddleProblem& prob, const LyapunovReference& ref,
                                      const Vec& z, const Vec& y, const ProximalOptions& opts = {});

struct SandwichReport {
  CertificateValue h;
  CertificateValue bound;  // the saddle-gap vector
  double worst_violation = 0.0;  // max(0, -h_i, h_i - bound_i) over both components
  double slack = 1e-9;
  [[nodiscard]] bool passed() const { return worst_violation <= slack; }
};

/// Checks bound >= h >= 0 componentwise, bound being the saddle-gap vector
/// of prob at p relative to ref.
SandwichReport sandwich_check(const SaddleProblem& prob, const LyapunovReference& ref,
                              const PointPair& p, const CertificateValue& h, double slack = 1e-9);

enum class CertificateKind { None, Strict, Separable, Proximal };

const char* to_string(CertificateKind k);

/// Everything needed to evaluate V, h and the field residual on the states of
/// a trajectory. The reference is expressed in the original (x, y)
/// coordinates, or (z, y) for the proximal flow.
struct MonitorContext {
  SaddleProblem problem;
  VectorField field;
  LyapunovReference reference;
  CertificateKind certificate = CertificateKind::None;
  ProximalOptions proximal;
};

/// Lyapunov reference in the state coordinates of the field: augmented
/// fields use (x*, x*, y*, y*) over ([x; z], [y; w]).
LyapunovReference state_reference(const MonitorContext& ctx);

/// Splits a state vector of ctx.field into a primal/dual pair.
PointPair split_state(const VectorField& field, const Vec& state);

AuxSample evaluate_aux(const MonitorContext& ctx, const Vec& state);

/// Fills traj.aux with (V, h1, h2, residual) for every sample.
void annotate(Trajectory& traj, const MonitorContext& ctx);

struct MonitorReport {
  double max_lyapunov_increase = 0.0;  // max_k V(t_{k+1}) - V(t_k), may be negative
  double max_lyapunov_derivative = 0.0;  // max analytic Vdot over samples
  double initial_lyapunov = 0.0;
  double terminal_lyapunov = 0.0;
  double min_h = 0.0;  // smallest certificate component seen
  CertificateValue terminal_h;
  double terminal_residual = 0.0;
  std::size_t samples = 0;
};

/// Analytic Vdot = (s - s*)^T f(s) in state coordinates.
double lyapunov_derivative(const MonitorContext& ctx, const Vec& state);

/// Annotates the trajectory if needed and summarizes V-descent and the
/// terminal certificate.
MonitorReport trajectory_monitor(const MonitorContext& ctx, Trajectory& traj);

}  // namespace saddleflow
