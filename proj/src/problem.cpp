#include "saddleflow/problem.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "saddleflow/errors.hpp"

namespace saddleflow {

const char* to_string(ConvexityClass c) {
  switch (c) {
    case ConvexityClass::ConvexConcave:
      return "convex-concave";
    case ConvexityClass::StrictlyConvexConcave:
      return "strictly-convex-concave";
    case ConvexityClass::Bilinear:
      return "bilinear";
  }
  return "unknown";
}

void check_dimensions(const SaddleProblem& prob, const PointPair& p) {
  if (static_cast<std::size_t>(p.x.size()) != prob.n ||
      static_cast<std::size_t>(p.y.size()) != prob.m) {
    throw DimensionMismatch("point has dimensions (" + std::to_string(p.x.size()) + ", " +
                            std::to_string(p.y.size()) + "), problem '" + prob.name +
                            "' expects (" + std::to_string(prob.n) + ", " +
                            std::to_string(prob.m) + ")");
  }
}

Gradients eval_gradients(const SaddleProblem& prob, const PointPair& p) {
  check_dimensions(prob, p);
  Gradients g{prob.grad_x(p.x, p.y), prob.grad_y(p.x, p.y)};
  if (static_cast<std::size_t>(g.gx.size()) != prob.n ||
      static_cast<std::size_t>(g.gy.size()) != prob.m) {
    throw DimensionMismatch("gradient oracle of '" + prob.name + "' returned wrong dimension");
  }
  return g;
}

double stationarity_residual(const SaddleProblem& prob, const PointPair& p) {
  const Gradients g = eval_gradients(prob, p);
  return std::sqrt(g.gx.squaredNorm() + g.gy.squaredNorm());
}

double eval_value(const SaddleProblem& prob, const PointPair& p) {
  if (!prob.has_value()) {
    throw UnsupportedOperation("problem '" + prob.name + "' has no value oracle");
  }
  check_dimensions(prob, p);
  return prob.value(p.x, p.y);
}

SaddleInequalityReport check_saddle_inequality(const SaddleProblem& prob,
                                               const PointPair& candidate,
                                               const PointSampler& sampler, std::size_t k,
                                               double slack) {
  if (!prob.has_value()) {
    throw UnsupportedOperation("saddle inequality check needs a value oracle");
  }
  SaddleInequalityReport report;
  report.slack = slack;
  report.candidate_residual = stationarity_residual(prob, candidate);
  const double s_star = eval_value(prob, candidate);
  report.worst_sample = candidate;
  for (std::size_t i = 0; i < k; ++i) {
    PointPair s = sampler();
    check_dimensions(prob, s);
    // S(x*, y) <= S* and S* <= S(x, y*)
    const double upper = prob.value(candidate.x, s.y) - s_star;
    const double lower = s_star - prob.value(s.x, candidate.y);
    const double v = std::max({upper, lower, 0.0});
    if (v > report.worst_violation) {
      report.worst_violation = v;
      report.worst_sample = std::move(s);
    }
    ++report.samples;
  }
  return report;
}

SaddleEstimate make_estimate(const SaddleProblem& prob, PointPair p, double tol) {
  SaddleEstimate est;
  est.stationarity_residual = stationarity_residual(prob, p);
  est.converged = est.stationarity_residual <= tol;
  est.point = std::move(p);
  return est;
}

}  // namespace saddleflow
