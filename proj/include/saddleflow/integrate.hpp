#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "saddleflow/flows.hpp"

namespace saddleflow {

enum class Scheme { Euler, Rk4 };

const char* to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct IntegratorConfig {
  Scheme scheme = Scheme::Rk4;
  double dt = 1e-3;
  double t_max = 2000.0;
  double conv_tol = 1e-8;
  std::size_t conv_window = 10;
  std::size_t record_stride = 100;

  void validate() const;
};

/// Per-sample monitor values attached after integration.
struct AuxSample {
  double lyapunov = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  double residual = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<AuxSample> aux;  // empty, or one entry per sample

  [[nodiscard]] std::size_t size() const { return times.size(); }
  [[nodiscard]] bool empty() const { return times.empty(); }
  [[nodiscard]] bool has_aux() const { return !aux.empty(); }
  [[nodiscard]] const Vec& final_state() const { return states.back(); }
};

enum class StopTag { Converged, HorizonReached, Diverged, InnerFailure };

const char* to_string(StopTag tag);

struct StopReason {
  StopTag tag = StopTag::HorizonReached;
  std::string detail;
  double final_residual = 0.0;
  double final_time = 0.0;
};

/// Norm above which a state counts as diverged.
inline constexpr double kDivergenceNorm = 1e12;

/// One Euler or RK4 step, followed by clamping the field's masked coordinates
/// to the nonnegative orthant. Throws Diverged on a non-finite field value.
Vec step(const VectorField& field, const Vec& state, double dt, Scheme scheme = Scheme::Rk4);

struct IntegrationResult {
  Trajectory trajectory;
  StopReason stop;
};

/// Steps until the field norm stays below conv_tol for conv_window
/// consecutive recorded samples, the horizon is reached, or the state
/// diverges. Records every record_stride-th step and the final state.
IntegrationResult integrate(const VectorField& field, const Vec& init, const IntegratorConfig& cfg);

}  // namespace saddleflow
