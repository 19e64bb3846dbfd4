#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "saddleflow/control.hpp"
#include "saddleflow/errors.hpp"
#include "saddleflow/reference.hpp"

using namespace saddleflow;

namespace {
Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) out[i++] = a;
  return out;
}

ControlProblem scalar_case() {
  return {Mat::Ones(1, 1), Mat::Ones(1, 1), Mat::Ones(1, 1), vec({0}), vec({0}), 1};
}

// Feasible random instance: d leaves slack around the zero-control trajectory.
ControlProblem random_case(std::mt19937_64& rng, int n, int t) {
  // entries bounded away from zero: near-zero dynamics make the LP degenerate
  // and the flow's approach to it arbitrarily slow
  auto away_from_zero = [&](double lo, double hi) {
    Mat a = oracle::random_mat(rng, n, n, lo, hi);
    std::bernoulli_distribution flip(0.5);
    for (Eigen::Index i = 0; i < a.size(); ++i)
      if (flip(rng)) a.data()[i] = -a.data()[i];
    return a;
  };
  ControlProblem cp;
  cp.g = away_from_zero(0.5, 1.2);
  cp.h = away_from_zero(0.5, 1.5);
  cp.d = oracle::random_mat(rng, 1, n, -1, 1);
  cp.x0 = oracle::random_vec(rng, n, -3, 3);
  cp.horizon = static_cast<std::size_t>(t);
  Vec x = cp.x0;
  for (int k = 0; k < t; ++k) x = cp.g * x;
  cp.dv = cp.d * x;
  cp.dv[0] += 0.5;
  return cp;
}
}  // namespace

TEST_CASE("variable map layout") {
  const ControlLp cl = build_lp(two_agent_instance());
  const VariableMap& m = cl.map;
  CHECK(m.variables() == 16);
  CHECK(cl.lp.n() == 16);
  // 2NT dynamics + M final + 4NT nonnegativity rows
  CHECK(cl.lp.m() == 8 + 1 + 16);
  CHECK(m.x_plus(1, 0) == 0);
  CHECK(m.x_plus(2, 1) == 3);
  CHECK(m.x_minus(1, 0) == 4);
  CHECK(m.u_plus(0, 0) == 8);
  CHECK(m.u_minus(1, 1) == 15);
  CHECK(m.final_row_begin == 8);
  CHECK(m.final_row_count == 1);
  CHECK(m.nonneg_row_begin == 9);
  CHECK(m.variable_names().size() == 16);
  CHECK(cl.lp.c == Vec::Ones(16));
  for (std::size_t v = 0; v < 16; ++v) {
    CHECK(cl.lp.a(static_cast<Eigen::Index>(m.nonneg_row_begin + v), static_cast<Eigen::Index>(v)) ==
          -1.0);
  }
}

TEST_CASE("simulate") {
  ControlProblem cp = two_agent_instance();
  cp.g = Mat::Identity(2, 2);
  auto xs = simulate(cp, {Vec::Zero(2), Vec::Zero(2)});
  CHECK(xs[0] == cp.x0);
  CHECK(xs[1] == cp.x0);

  cp = two_agent_instance();
  cp.g = Mat::Zero(2, 2);
  xs = simulate(cp, {vec({1, 2}), vec({3, 4})});
  CHECK(xs[0] == cp.h * vec({1, 2}));
  CHECK(xs[1] == cp.h * vec({3, 4}));

  const PublishedSolution pub = published_solution();
  xs = simulate(two_agent_instance(), pub.u);
  for (std::size_t t = 0; t < 2; ++t) CHECK((xs[t] - pub.x[t]).cwiseAbs().maxCoeff() <= 5e-4);

  CHECK_THROWS(simulate(two_agent_instance(), {Vec::Zero(2)}));
}

TEST_CASE("trivial control problem") {
  const ControlProblem cp = scalar_case();
  const ControlLp cl = build_lp(cp);
  const LpSolveResult r = solve(cl.lp);
  REQUIRE(r.converged());
  const ControlSolution s = recover_solution(cp, cl.map, r.solution.x);
  CHECK(std::abs(s.u[0][0]) <= 1e-6);
  CHECK(std::abs(s.x[0][0]) <= 1e-6);
  CHECK(std::abs(s.objective) <= 1e-6);
  CHECK(reference_solve(cl.lp).objective == doctest::Approx(0.0));
}

TEST_CASE("random control instances: flow against the oracle") {
  std::mt19937_64 rng(303);
  for (int k = 0; k < 4; ++k) {
    const ControlProblem cp = random_case(rng, 1, 2 + k % 2);
    const ControlLp cl = build_lp(cp);
    const ReferenceSolution ref = reference_solve(cl.lp);
    REQUIRE(ref.status == LpStatus::Optimal);
    const LpSolveResult r = solve(cl.lp);
    REQUIRE(r.converged());
    CHECK(std::abs(r.objective - ref.objective) <= 1e-3);

    const ControlSolution s = recover_solution(cp, cl.map, r.solution.x);
    const auto replay = simulate(cp, s.u);
    for (std::size_t t = 0; t < cp.horizon; ++t) CHECK((replay[t] - s.x[t]).norm() <= 1e-9);
    CHECK((cp.d * s.x.back() - cp.dv).maxCoeff() <= 1e-4);
    CHECK(s.objective == doctest::Approx(control_objective(s.x, s.u)).epsilon(1e-12));
    // the LP's own x agrees with the replay up to the solve tolerance
    const auto lp_x = cl.map.states(r.solution.x);
    for (std::size_t t = 0; t < cp.horizon; ++t) CHECK((lp_x[t] - s.x[t]).norm() <= 1e-3);
  }
}

TEST_CASE("control objective") {
  CHECK(control_objective({vec({1, -2})}, {vec({-3, 0.5})}) == 6.5);
}

TEST_CASE("control file format") {
  std::istringstream in(
      "2 1 2\n"
      "1.1 0\n-0.7 1.1\n"
      "1.5 0\n0 0\n"
      "1 1.5\n"
      "3\n"
      "6 10\n");
  const ControlProblem cp = read_control(in);
  const ControlProblem ref = two_agent_instance();
  CHECK(cp.g == ref.g);
  CHECK(cp.h == ref.h);
  CHECK(cp.d == ref.d);
  CHECK(cp.dv == ref.dv);
  CHECK(cp.x0 == ref.x0);
  CHECK(cp.horizon == 2);

  std::istringstream bad("2 1 0\n");
  CHECK_THROWS_AS(read_control(bad), ParseError);
  std::istringstream trunc("1 1 1\n1\n1\n");
  CHECK_THROWS_AS(read_control(trunc), ParseError);
  std::istringstream extra("1 1 1\n1\n1\n1\n0\n0\n9\n");
  CHECK_THROWS_AS(read_control(extra), ParseError);
  CHECK_THROWS_AS(read_control_file("/nonexistent.ctl"), ParseError);
}

TEST_CASE("control validation") {
  ControlProblem cp = two_agent_instance();
  cp.h = Mat::Zero(3, 2);
  CHECK_THROWS_AS(cp.validate(), InvalidArgument);
  cp = two_agent_instance();
  cp.horizon = 0;
  CHECK_THROWS_AS(cp.validate(), InvalidArgument);
}
