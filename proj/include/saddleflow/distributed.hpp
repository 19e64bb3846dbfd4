#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "saddleflow/flows.hpp"
#include "saddleflow/integrate.hpp"
#include "saddleflow/lp.hpp"

namespace saddleflow {

/// Owns x_i and z_i together with its cost c_i and constraint column A_i.
struct PrimalAgent {
  std::size_t index = 0;
  double cost = 0.0;
  Vec column;  // i-th column of A, length m
};

/// Owns y_j and w_j together with its constraint row A_j and offset b_j.
struct DualAgent {
  std::size_t index = 0;
  Vec row;  // j-th row of A, length n
  double offset = 0.0;
};

struct AgentPartition {
  std::vector<PrimalAgent> primal_agents;
  std::vector<DualAgent> dual_agents;

  [[nodiscard]] std::size_t n() const { return primal_agents.size(); }
  [[nodiscard]] std::size_t m() const { return dual_agents.size(); }
  /// Rebuilds (c, A, b) from the agents' parameters.
  [[nodiscard]] LinearProgram reassemble() const;
};

AgentPartition partition(const LinearProgram& lp);

struct PrimalLocalState {
  double x = 0.0;
  double z = 0.0;
};

struct DualLocalState {
  double y = 0.0;
  double w = 0.0;
};

struct LocalStates {
  std::vector<PrimalLocalState> primal;
  std::vector<DualLocalState> dual;

  static LocalStates from_augmented(const AugmentedState& st);
  [[nodiscard]] AugmentedState to_augmented() const;
};

enum class AgentRole { Primal, Dual };

struct AgentId {
  AgentRole role = AgentRole::Primal;
  std::size_t index = 0;
};

/// A primal agent broadcasts {x_i}; a dual agent broadcasts {y_j}.
struct RoundMessage {
  AgentId sender;
  std::vector<double> payload;
  long round = 0;
};

/// Previous-round values of x and y as seen by every agent.
struct Broadcast {
  long round = 0;
  std::optional<Vec> x;
  std::optional<Vec> y;
};

std::vector<RoundMessage> emit_messages(const LocalStates& states, long round);

/// Collects one message per agent into a broadcast. Throws ProtocolError on a
/// missing, duplicated, stale or non-finite message.
Broadcast assemble_broadcast(const std::vector<RoundMessage>& messages, std::size_t n,
                             std::size_t m, long round);

/// One local projected Euler step per agent, each reading only its own
/// parameters and state plus the broadcast values its update needs.
/// Throws ProtocolError if the broadcast lacks x or y, or has the wrong size.
LocalStates distributed_round(const AgentPartition& part, const LocalStates& states,
                              const Broadcast& broadcast, const RegularizationConfig& cfg,
                              double dt);

struct DistributedRun {
  Trajectory trajectory;  // states in [x; z; y; w] layout
  StopReason stop;
  long rounds = 0;
};

/// Runs synchronous rounds until the centralized field norm stays below
/// conv_tol for conv_window recorded samples or t_max / dt rounds elapse.
/// The scheme field of icfg is ignored: rounds are Euler steps.
DistributedRun run_distributed(const LinearProgram& lp, const RegularizationConfig& cfg,
                               const IntegratorConfig& icfg,
                               const std::optional<AugmentedState>& init = std::nullopt);

}  // namespace saddleflow
