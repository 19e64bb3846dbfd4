#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace saddleflow {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class ConvexityClass { ConvexConcave, StrictlyConvexConcave, Bilinear };

const char* to_string(ConvexityClass c);

using ValueOracle = std::function<double(const Vec& x, const Vec& y)>;
using GradientOracle = std::function<Vec(const Vec& x, const Vec& y)>;

/// A convex-concave function S(x, y) given through oracles.
///
/// The value oracle is optional: the flows only need gradients. Oracles must be
/// pure so that a problem can be shared between concurrent integrations.
struct SaddleProblem {
  std::size_t n = 0;
  std::size_t m = 0;
  ValueOracle value;
  GradientOracle grad_x;
  GradientOracle grad_y;
  ConvexityClass convexity = ConvexityClass::ConvexConcave;
  // Structure hint: grad_x is affine in x. Lets the proximal inner solve use
  // a direct linear solve.
  bool quadratic_in_x = false;
  std::string name;

  [[nodiscard]] bool has_value() const { return static_cast<bool>(value); }
};

struct PointPair {
  Vec x;
  Vec y;
};

struct SaddleEstimate {
  PointPair point;
  double stationarity_residual = 0.0;
  bool converged = false;
};

struct Gradients {
  Vec gx;
  Vec gy;
};

/// Throws DimensionMismatch unless p matches the problem's (n, m).
void check_dimensions(const SaddleProblem& prob, const PointPair& p);

Gradients eval_gradients(const SaddleProblem& prob, const PointPair& p);

/// Euclidean norm of the stacked gradient (gx, gy).
double stationarity_residual(const SaddleProblem& prob, const PointPair& p);

double eval_value(const SaddleProblem& prob, const PointPair& p);

/// Outcome of a sampled check of S(x*, y) <= S(x*, y*) <= S(x, y*).
struct SaddleInequalityReport {
  std::size_t samples = 0;
  double worst_violation = 0.0;  // max(0, largest one-sided gap) over samples
  PointPair worst_sample;
  double candidate_residual = 0.0;
  double slack = 1e-9;

  [[nodiscard]] bool passed() const { return worst_violation <= slack; }
};

using PointSampler = std::function<PointPair()>;

SaddleInequalityReport check_saddle_inequality(const SaddleProblem& prob,
                                               const PointPair& candidate,
                                               const PointSampler& sampler, std::size_t k,
                                               double slack = 1e-9);

SaddleEstimate make_estimate(const SaddleProblem& prob, PointPair p, double tol);

}  // namespace saddleflow
