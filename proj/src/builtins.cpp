#include "saddleflow/builtins.hpp"

#include "saddleflow/errors.hpp"
#include "saddleflow/lp.hpp"

namespace saddleflow {

SaddleProblem bilinear_problem() {
  SaddleProblem p;
  p.n = 1;
  p.m = 1;
  p.name = "bilinear";
  p.convexity = ConvexityClass::Bilinear;
  p.value = [](const Vec& x, const Vec& y) { return x[0] * y[0]; };
  p.grad_x = [](const Vec&, const Vec& y) { return Vec(y); };
  p.grad_y = [](const Vec& x, const Vec&) { return Vec(x); };
  return p;
}

SaddleProblem bilinear_matrix_problem(const Mat& b) {
  if (b.rows() == 0 || b.cols() == 0) throw InvalidArgument("coupling matrix must be nonempty");
  SaddleProblem p;
  p.n = static_cast<std::size_t>(b.rows());
  p.m = static_cast<std::size_t>(b.cols());
  p.name = "bilinear-matrix";
  p.convexity = ConvexityClass::Bilinear;
  p.value = [b](const Vec& x, const Vec& y) { return x.dot(b * y); };
  p.grad_x = [b](const Vec&, const Vec& y) { return Vec(b * y); };
  p.grad_y = [b](const Vec& x, const Vec&) { return Vec(b.transpose() * x); };
  return p;
}

SaddleProblem quadratic_problem() {
  SaddleProblem p;
  p.n = 1;
  p.m = 1;
  p.name = "quadratic";
  p.convexity = ConvexityClass::StrictlyConvexConcave;
  p.quadratic_in_x = true;
  p.value = [](const Vec& x, const Vec& y) { return 0.5 * x[0] * x[0] - 0.5 * y[0] * y[0]; };
  p.grad_x = [](const Vec& x, const Vec&) { return Vec(x); };
  p.grad_y = [](const Vec&, const Vec& y) { return Vec(-y); };
  return p;
}

SaddleProblem coupled_quadratic_problem() {
  SaddleProblem p;
  p.n = 1;
  p.m = 1;
  p.name = "coupled-quadratic";
  p.convexity = ConvexityClass::StrictlyConvexConcave;
  p.quadratic_in_x = true;
  p.value = [](const Vec& x, const Vec& y) {
    return 0.5 * x[0] * x[0] - 0.5 * y[0] * y[0] + x[0] * y[0];
  };
  p.grad_x = [](const Vec& x, const Vec& y) { return Vec(x + y); };
  p.grad_y = [](const Vec& x, const Vec& y) { return Vec(x - y); };
  return p;
}

namespace {

std::vector<BuiltinProblem> make_builtins() {
  auto pp = [](std::initializer_list<double> x, std::initializer_list<double> y) {
    PointPair p{Vec(static_cast<Eigen::Index>(x.size())), Vec(static_cast<Eigen::Index>(y.size()))};
    Eigen::Index i = 0;
    for (double v : x) p.x[i++] = v;
    i = 0;
    for (double v : y) p.y[i++] = v;
    return p;
  };

  std::vector<BuiltinProblem> out;
  out.push_back({"bilinear", "S(x,y) = x y", bilinear_problem(), pp({0.0}, {0.0}), std::nullopt});
  out.push_back({"quadratic", "S(x,y) = x^2/2 - y^2/2", quadratic_problem(), pp({0.0}, {0.0}), std::nullopt});
  out.push_back({"coupled-quadratic", "S(x,y) = x^2/2 - y^2/2 + x y", coupled_quadratic_problem(),
                 pp({0.0}, {0.0}), std::nullopt});

  Mat b(2, 2);
  b << 1.0, 2.0, 0.0, 1.0;
  out.push_back({"bilinear-matrix", "S(x,y) = x^T B y with B = [[1,2],[0,1]]",
                 bilinear_matrix_problem(b), pp({0.0, 0.0}, {0.0, 0.0}), std::nullopt});

  LinearProgram lp{Vec::Constant(1, 1.0), Mat::Constant(1, 1, -1.0), Vec::Constant(1, -1.0)};
  SaddleProblem lag = lagrangian(lp);
  lag.name = "lp-small";
  out.push_back({"lp-small", "Lagrangian of min x s.t. x >= 1", lag, pp({1.0}, {1.0}), lp});
  return out;
}

}  // namespace

const std::vector<BuiltinProblem>& builtin_problems() {
  static const std::vector<BuiltinProblem> all = make_builtins();
  return all;
}

const BuiltinProblem& builtin(const std::string& name) {
  for (const auto& b : builtin_problems()) {
    if (b.name == name) return b;
  }
  throw InvalidArgument("unknown builtin problem '" + name + "'");
}

std::vector<std::string> builtin_names() {
  std::vector<std::string> names;
  for (const auto& b : builtin_problems()) names.push_back(b.name);
  return names;
}

}  // namespace saddleflow
