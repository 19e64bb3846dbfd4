#pragma once

#include <optional>
#include <string>
#include <vector>

#include "saddleflow/lp.hpp"
#include "saddleflow/problem.hpp"

namespace saddleflow {

/// A named test problem together with a saddle point known in closed form.
/// Every known saddle has y* >= 0 so the same reference serves the
/// projected flows.
struct BuiltinProblem {
  std::string name;
  std::string description;
  SaddleProblem problem;
  std::optional<PointPair> saddle;
  /// Set when the problem is the Lagrangian of a linear program.
  std::optional<LinearProgram> lp;
};

/// S(x, y) = x y
SaddleProblem bilinear_problem();
/// S(x, y) = x^T B y for a square matrix B.
SaddleProblem bilinear_matrix_problem(const Mat& b);
/// S(x, y) = x^2/2 - y^2/2
SaddleProblem quadratic_problem();
/// S(x, y) = x^2/2 - y^2/2 + x y
SaddleProblem coupled_quadratic_problem();

const std::vector<BuiltinProblem>& builtin_problems();

/// Throws InvalidArgument on an unknown name.
const BuiltinProblem& builtin(const std::string& name);

std::vector<std::string> builtin_names();

}  // namespace saddleflow
