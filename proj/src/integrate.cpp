#include "saddleflow/integrate.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <fmt/format.h>

#include "saddleflow/errors.hpp"

namespace saddleflow {

const char* to_string(Scheme s) { return s == Scheme::Euler ? "euler" : "rk4"; }

Scheme scheme_from_string(const std::string& s) {
  if (s == "euler") return Scheme::Euler;
  if (s == "rk4") return Scheme::Rk4;
  throw InvalidArgument("unknown integration scheme '" + s + "'");
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be finite and > 0");
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw InvalidArgument("t_max must be finite and > 0");
  if (dt > t_max) throw InvalidArgument("dt must not exceed t_max");
  if (!(conv_tol > 0.0)) throw InvalidArgument("conv_tol must be > 0");
  if (conv_window < 1) throw InvalidArgument("conv_window must be >= 1");
  if (record_stride < 1) throw InvalidArgument("record_stride must be >= 1");
}

const char* to_string(StopTag tag) {
  switch (tag) {
    case StopTag::Converged:
      return "converged";
    case StopTag::HorizonReached:
      return "horizon-reached";
    case StopTag::Diverged:
      return "diverged";
    case StopTag::InnerFailure:
      return "inner-failure";
  }
  return "unknown";
}

namespace {

Vec checked_eval(const VectorField& field, const Vec& s) {
  Vec f = field(s);
  if (!f.allFinite()) throw Diverged("vector field returned a non-finite value");
  return f;
}

}  // namespace

Vec step(const VectorField& field, const Vec& state, double dt, Scheme scheme) {
  if (!(dt > 0.0)) throw InvalidArgument("step size must be > 0");
  Vec next;
  if (scheme == Scheme::Euler) {
    next = state + dt * checked_eval(field, state);
  } else {
    const Vec k1 = checked_eval(field, state);
    const Vec k2 = checked_eval(field, state + (0.5 * dt) * k1);
    const Vec k3 = checked_eval(field, state + (0.5 * dt) * k2);
    const Vec k4 = checked_eval(field, state + dt * k3);
    next = state + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  for (std::size_t i = 0; i < field.nonneg_mask.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    if (field.nonneg_mask[i] && next[ii] < 0.0) next[ii] = 0.0;
  }
  return next;
}

IntegrationResult integrate(const VectorField& field, const Vec& init, const IntegratorConfig& cfg) {
  cfg.validate();
  if (static_cast<std::size_t>(init.size()) != field.dimension) {
    throw DimensionMismatch("initial state has size " + std::to_string(init.size()) +
                            ", field expects " + std::to_string(field.dimension));
  }
  for (std::size_t i = 0; i < field.nonneg_mask.size(); ++i) {
    if (field.nonneg_mask[i] && init[static_cast<Eigen::Index>(i)] < 0.0) {
      throw InvalidInit("initial coordinate " + std::to_string(i) +
                        " must be >= 0 for a projected flow");
    }
  }

  IntegrationResult out;
  Trajectory& traj = out.trajectory;
  StopReason& stop = out.stop;
  const auto total = static_cast<long long>(std::llround(cfg.t_max / cfg.dt));
  const auto stride = static_cast<long long>(cfg.record_stride);

  std::size_t below = 0;
  double residual = 0.0;
  // Records the sample and reports whether the convergence window is full.
  auto record = [&](long long k, const Vec& s) {
    traj.times.push_back(static_cast<double>(k) * cfg.dt);
    traj.states.push_back(s);
    residual = checked_eval(field, s).norm();
    below = residual <= cfg.conv_tol ? below + 1 : 0;
    return below >= cfg.conv_window;
  };
  auto finish = [&](StopTag tag, std::string detail) {
    stop.tag = tag;
    stop.detail = std::move(detail);
    stop.final_residual = residual;
    stop.final_time = traj.times.empty() ? 0.0 : traj.times.back();
    return out;
  };

  Vec state = init;
  long long k_state = 0;
  // Appends the current state without evaluating the field.
  auto keep_current = [&]() {
    const double t = static_cast<double>(k_state) * cfg.dt;
    if (traj.times.empty() || traj.times.back() != t) {
      traj.times.push_back(t);
      traj.states.push_back(state);
    }
  };
  try {
    if (record(0, state)) {
      return finish(StopTag::Converged, "started inside the convergence window");
    }
    for (long long k = 1; k <= total; ++k) {
      Vec next;
      try {
        next = step(field, state, cfg.dt, cfg.scheme);
      } catch (const Diverged& e) {
        keep_current();
        residual = std::numeric_limits<double>::infinity();
        return finish(StopTag::Diverged, e.what());
      }
      state = std::move(next);
      k_state = k;
      if (!state.allFinite() || state.norm() > kDivergenceNorm) {
        keep_current();
        residual = std::numeric_limits<double>::infinity();
        return finish(StopTag::Diverged, fmt::format("state norm exceeded {:g} at t = {:g}",
                                                         kDivergenceNorm, k * cfg.dt));
      }
      if (k % stride == 0 || k == total) {
        if (record(k, state)) {
          return finish(StopTag::Converged, fmt::format("field norm <= {:g} over {} recorded samples",
                                                            cfg.conv_tol, cfg.conv_window));
        }
      }
    }
  } catch (const Diverged& e) {
    keep_current();
    residual = std::numeric_limits<double>::infinity();
    return finish(StopTag::Diverged, e.what());
  } catch (const NoConvergence& e) {
    keep_current();
    residual = e.best_residual;
    return finish(StopTag::InnerFailure, e.what());
  }
  return finish(StopTag::HorizonReached,
                fmt::format("horizon t_max = {:g} reached with field norm {:.3e}", cfg.t_max,
                            residual));
}

}  // namespace saddleflow
