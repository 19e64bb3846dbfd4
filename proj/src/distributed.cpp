#include "saddleflow/distributed.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "saddleflow/errors.hpp"

namespace saddleflow {

LinearProgram AgentPartition::reassemble() const {
  const auto n = static_cast<Eigen::Index>(primal_agents.size());
  const auto m = static_cast<Eigen::Index>(dual_agents.size());
  LinearProgram lp{Vec(n), Mat(m, n), Vec(m)};
  for (const auto& a : primal_agents) {
    lp.c[static_cast<Eigen::Index>(a.index)] = a.cost;
  }
  for (const auto& d : dual_agents) {
    const auto j = static_cast<Eigen::Index>(d.index);
    lp.a.row(j) = d.row.transpose();
    lp.b[j] = d.offset;
  }
  return lp;
}

AgentPartition partition(const LinearProgram& lp) {
  lp.validate();
  AgentPartition part;
  for (Eigen::Index i = 0; i < lp.a.cols(); ++i) {
    part.primal_agents.push_back({static_cast<std::size_t>(i), lp.c[i], lp.a.col(i)});
  }
  for (Eigen::Index j = 0; j < lp.a.rows(); ++j) {
    part.dual_agents.push_back({static_cast<std::size_t>(j), lp.a.row(j).transpose(), lp.b[j]});
  }
  return part;
}

LocalStates LocalStates::from_augmented(const AugmentedState& st) {
  LocalStates s;
  for (Eigen::Index i = 0; i < st.x.size(); ++i) s.primal.push_back({st.x[i], st.z[i]});
  for (Eigen::Index j = 0; j < st.y.size(); ++j) s.dual.push_back({st.y[j], st.w[j]});
  return s;
}

AugmentedState LocalStates::to_augmented() const {
  AugmentedState st = AugmentedState::zeros(primal.size(), dual.size());
  for (std::size_t i = 0; i < primal.size(); ++i) {
    st.x[static_cast<Eigen::Index>(i)] = primal[i].x;
    st.z[static_cast<Eigen::Index>(i)] = primal[i].z;
  }
  for (std::size_t j = 0; j < dual.size(); ++j) {
    st.y[static_cast<Eigen::Index>(j)] = dual[j].y;
    st.w[static_cast<Eigen::Index>(j)] = dual[j].w;
  }
  return st;
}

std::vector<RoundMessage> emit_messages(const LocalStates& states, long round) {
  std::vector<RoundMessage> out;
  out.reserve(states.primal.size() + states.dual.size());
  for (std::size_t i = 0; i < states.primal.size(); ++i) {
    out.push_back({{AgentRole::Primal, i}, {states.primal[i].x}, round});
  }
  for (std::size_t j = 0; j < states.dual.size(); ++j) {
    out.push_back({{AgentRole::Dual, j}, {states.dual[j].y}, round});
  }
  return out;
}

Broadcast assemble_broadcast(const std::vector<RoundMessage>& messages, std::size_t n,
                             std::size_t m, long round) {
  Vec x(static_cast<Eigen::Index>(n));
  Vec y(static_cast<Eigen::Index>(m));
  std::vector<bool> seen_x(n, false);
  std::vector<bool> seen_y(m, false);
  for (const RoundMessage& msg : messages) {
    const bool primal = msg.sender.role == AgentRole::Primal;
    const std::string who = std::string(primal ? "primal" : "dual") + " agent " +
                            std::to_string(msg.sender.index);
    if (msg.round != round) {
      throw ProtocolError(who + " sent a message for round " + std::to_string(msg.round) +
                          " during round " + std::to_string(round));
    }
    if (msg.payload.size() != 1 || !std::isfinite(msg.payload[0])) {
      throw ProtocolError(who + " sent a malformed payload");
    }
    auto& seen = primal ? seen_x : seen_y;
    if (msg.sender.index >= seen.size()) throw ProtocolError("unknown sender: " + who);
    if (seen[msg.sender.index]) throw ProtocolError("duplicate message from " + who);
    seen[msg.sender.index] = true;
    (primal ? x : y)[static_cast<Eigen::Index>(msg.sender.index)] = msg.payload[0];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen_x[i]) throw ProtocolError("missing message from primal agent " + std::to_string(i));
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!seen_y[j]) throw ProtocolError("missing message from dual agent " + std::to_string(j));
  }
  return {round, std::move(x), std::move(y)};
}

namespace {

// Agent updates. Each sees its own parameters, its own state and the
// broadcast vector it depends on, nothing else. The arithmetic mirrors the
// centralized projected regularized field term by term.
PrimalLocalState primal_update(const PrimalAgent& agent, const PrimalLocalState& s,
                               const Vec& y, double rho, double dt) {
  double ay = 0.0;
  for (Eigen::Index j = 0; j < agent.column.size(); ++j) ay += agent.column[j] * y[j];
  const double grad = agent.cost + ay;
  const double gap = (s.x - s.z) / rho;
  const double xdot = -grad - gap;
  const double zdot = gap;
  return {s.x + dt * xdot, s.z + dt * zdot};
}

DualLocalState dual_update(const DualAgent& agent, const DualLocalState& s, const Vec& x,
                           double rho, double dt) {
  double ax = 0.0;
  for (Eigen::Index i = 0; i < agent.row.size(); ++i) ax += agent.row[i] * x[i];
  const double grad = ax - agent.offset;
  const double gap = (s.y - s.w) / rho;
  const double ydot = project_component(grad - gap, s.y);
  const double wdot = gap;
  double y = s.y + dt * ydot;
  if (y < 0.0) y = 0.0;
  return {y, s.w + dt * wdot};
}

}  // namespace

LocalStates distributed_round(const AgentPartition& part, const LocalStates& states,
                              const Broadcast& broadcast, const RegularizationConfig& cfg,
                              double dt) {
  cfg.validate();
  if (!(dt > 0.0)) throw InvalidArgument("round step dt must be > 0");
  if (states.primal.size() != part.n() || states.dual.size() != part.m()) {
    throw DimensionMismatch("local states do not match the agent partition");
  }
  if (!broadcast.x) throw ProtocolError("broadcast of x missing for round " + std::to_string(broadcast.round));
  if (!broadcast.y) throw ProtocolError("broadcast of y missing for round " + std::to_string(broadcast.round));
  if (static_cast<std::size_t>(broadcast.x->size()) != part.n() ||
      static_cast<std::size_t>(broadcast.y->size()) != part.m()) {
    throw ProtocolError("broadcast vectors have the wrong length");
  }
  LocalStates next;
  next.primal.reserve(part.n());
  next.dual.reserve(part.m());
  for (std::size_t i = 0; i < part.n(); ++i) {
    next.primal.push_back(
        primal_update(part.primal_agents[i], states.primal[i], *broadcast.y, cfg.rho, dt));
  }
  for (std::size_t j = 0; j < part.m(); ++j) {
    next.dual.push_back(dual_update(part.dual_agents[j], states.dual[j], *broadcast.x, cfg.rho, dt));
  }
  return next;
}

DistributedRun run_distributed(const LinearProgram& lp, const RegularizationConfig& cfg,
                               const IntegratorConfig& icfg,
                               const std::optional<AugmentedState>& init) {
  icfg.validate();
  const AgentPartition part = partition(lp);
  // Used only for the convergence test, never for the update itself.
  const VectorField field = projected_regularized_field(lagrangian(lp), cfg);
  const AugmentedState start = init.value_or(AugmentedState::zeros(lp.n(), lp.m()));
  for (Eigen::Index j = 0; j < start.y.size(); ++j) {
    if (start.y[j] < 0.0) throw InvalidInit("initial y must be nonnegative");
  }
  LocalStates states = LocalStates::from_augmented(start);

  DistributedRun run;
  const auto total = static_cast<long>(std::llround(icfg.t_max / icfg.dt));
  const auto stride = static_cast<long>(icfg.record_stride);
  std::size_t below = 0;
  double residual = 0.0;
  auto record = [&](long k) {
    const Vec s = states.to_augmented().pack();
    run.trajectory.times.push_back(static_cast<double>(k) * icfg.dt);
    run.trajectory.states.push_back(s);
    residual = field(s).norm();
    below = residual <= icfg.conv_tol ? below + 1 : 0;
    return below >= icfg.conv_window;
  };
  auto finish = [&](StopTag tag, std::string detail, long k) {
    run.rounds = k;
    run.stop = {tag, std::move(detail), residual, run.trajectory.times.back()};
    return run;
  };

  if (record(0)) return finish(StopTag::Converged, "started inside the convergence window", 0);
  for (long k = 1; k <= total; ++k) {
    const Broadcast bc = assemble_broadcast(emit_messages(states, k), part.n(), part.m(), k);
    states = distributed_round(part, states, bc, cfg, icfg.dt);
    const Vec s = states.to_augmented().pack();
    if (!s.allFinite() || s.norm() > kDivergenceNorm) {
      run.trajectory.times.push_back(static_cast<double>(k) * icfg.dt);
      run.trajectory.states.push_back(s);
      residual = std::numeric_limits<double>::infinity();
      return finish(StopTag::Diverged, "state norm exceeded divergence threshold", k);
    }
    if (k % stride == 0 || k == total) {
      if (record(k)) return finish(StopTag::Converged, "field norm below tolerance", k);
    }
  }
  if (looks_ballistic(run.trajectory, field)) {
    return finish(StopTag::Diverged, "state drifting without settling; LP likely unbounded or infeasible",
                  total);
  }
  return finish(StopTag::HorizonReached, "round budget exhausted", total);
}

}  // namespace saddleflow
