#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "saddleflow/problem.hpp"

namespace saddleflow {

/// Original variables (x, y) plus their virtual copies (z, w).
struct AugmentedState {
  Vec x;
  Vec z;
  Vec y;
  Vec w;

  /// Packs as [x; z; y; w], the layout used by the regularized fields.
  [[nodiscard]] Vec pack() const;
  static AugmentedState unpack(const Vec& s, std::size_t n, std::size_t m);
  static AugmentedState aligned(const PointPair& p);
  static AugmentedState zeros(std::size_t n, std::size_t m);
};

struct RegularizationConfig {
  double rho = 1.0;

  void validate() const;
};

enum class FlowKind { Plain, Regularized, Projected, ProjectedRegularized, Proximal };

const char* to_string(FlowKind kind);
FlowKind flow_kind_from_string(const std::string& s);
[[nodiscard]] bool is_projected(FlowKind kind);
[[nodiscard]] bool is_augmented(FlowKind kind);

/// Autonomous vector field on R^dimension.
///
/// State layouts: [x; y] for plain and projected, [x; z; y; w] for the
/// regularized kinds, [z; y] for proximal. nonneg_mask marks coordinates that
/// live on the nonnegative orthant and is empty for unprojected kinds.
struct VectorField {
  std::size_t dimension = 0;
  std::function<Vec(const Vec&)> eval;
  FlowKind kind = FlowKind::Plain;
  std::vector<bool> nonneg_mask;
  std::size_t n = 0;  // primal block size of the underlying problem
  std::size_t m = 0;  // dual block size of the underlying problem
  double rho = 0.0;   // regularization coefficient, 0 when unused

  Vec operator()(const Vec& state) const;
  [[nodiscard]] bool projected() const { return !nonneg_mask.empty(); }
};

/// (x, y) -> (-grad_x S, +grad_y S)
VectorField plain_field(const SaddleProblem& prob);

/// S(x, z, y, w) = |x - z|^2 / (2 rho) + S(x, y) - |y - w|^2 / (2 rho) over the
/// primal block (x, z) and the dual block (y, w).
SaddleProblem augment(const SaddleProblem& prob, const RegularizationConfig& cfg);

VectorField regularized_field(const SaddleProblem& prob, const RegularizationConfig& cfg);

/// nu if y_i > 0, otherwise max(nu, 0).
inline double project_component(double nu, double y_i) {
  if (y_i > 0.0) return nu;
  return nu > 0.0 ? nu : 0.0;
}

/// Elementwise projection [nu]^+_y.
Vec project(const Vec& nu, const Vec& y);

VectorField projected_field(const SaddleProblem& prob);

/// Regularized field with the y equation projected. w is left unprojected.
VectorField projected_regularized_field(const SaddleProblem& prob,
                                        const RegularizationConfig& cfg);

struct ProximalOptions {
  double tol = 1e-10;
  std::size_t max_iterations = 100000;
};

/// argmin over x of S(x, y) + |x - z|^2 / 2, to ||grad_x S(x, y) + x - z|| <= tol.
/// Throws NoConvergence with the best iterate when the cap is hit.
Vec proximal_inner_argmin(const SaddleProblem& prob, const Vec& z, const Vec& y,
                          const ProximalOptions& opts = {});

/// The surrogate Sbar(z, y) = min_x {S(x, y) + |x - z|^2 / 2} as a problem over
/// (z, y). Gradients use grad_z Sbar = z - xbar and grad_y Sbar = grad_y S(xbar, y).
SaddleProblem proximal_surrogate(const SaddleProblem& prob, const ProximalOptions& opts = {});

/// Saddle flow of the proximal surrogate: zdot = xbar - z, ydot = grad_y S(xbar, y).
VectorField proximal_field(const SaddleProblem& prob, const ProximalOptions& opts = {});

/// Recovers (x, y) once the virtual copies have caught up with the originals.
/// Throws NotConverged when |x - z| > tol or |y - w| > tol.
PointPair extract_original_saddle(const AugmentedState& st, double tol);

}  // namespace saddleflow
