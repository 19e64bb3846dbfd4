#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "saddleflow/builtins.hpp"
#include "saddleflow/errors.hpp"
#include "saddleflow/integrate.hpp"
#include "saddleflow/lp.hpp"

using namespace saddleflow;

namespace {
Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) out[i++] = a;
  return out;
}

VectorField zero_field(std::size_t dim) {
  VectorField f;
  f.dimension = dim;
  f.eval = [dim](const Vec&) { return Vec::Zero(static_cast<Eigen::Index>(dim)); };
  return f;
}

// Error after integrating the bilinear circle for time t_end with step dt.
double circle_error(double dt, double t_end) {
  const VectorField f = plain_field(bilinear_problem());
  Vec s = vec({1, 0});
  const auto steps = static_cast<long>(std::llround(t_end / dt));
  for (long k = 0; k < steps; ++k) s = step(f, s, dt, Scheme::Rk4);
  return (s - vec({std::cos(t_end), std::sin(t_end)})).norm();
}
}  // namespace

TEST_CASE("single steps") {
  const Vec s = vec({0.3, -2});
  CHECK(step(zero_field(2), s, 0.7, Scheme::Euler) == s);
  CHECK(step(zero_field(2), s, 0.7, Scheme::Rk4) == s);
  const VectorField f = plain_field(bilinear_problem());
  const Vec e = step(f, vec({1, 0}), 0.1, Scheme::Euler);
  CHECK(e[0] == 1.0);
  CHECK(e[1] == doctest::Approx(0.1));
}

TEST_CASE("rk4 returns to the start after fifty periods") {
  const VectorField f = plain_field(bilinear_problem());
  Vec s = vec({1, 0});
  const auto steps = static_cast<long>(std::llround(100.0 * std::numbers::pi / 0.01));
  for (long k = 0; k < steps; ++k) s = step(f, s, 0.01, Scheme::Rk4);
  // the step count rounds 100 pi / dt; account for the leftover phase exactly
  const double t = static_cast<double>(steps) * 0.01;
  CHECK((s - vec({std::cos(t), std::sin(t)})).norm() <= 1e-6);
  CHECK((s - vec({1, 0})).norm() <= 1e-3);
}

TEST_CASE("rk4 is fourth order") {
  const double e1 = circle_error(0.1, 2.0);
  const double e2 = circle_error(0.05, 2.0);
  const double factor = e1 / e2;
  CAPTURE(factor);
  CHECK(factor >= 8.0);
  CHECK(factor <= 32.0);
}

TEST_CASE("projected steps are clamped") {
  LinearProgram lp{vec({1}), Mat::Constant(1, 1, -1), vec({-1})};
  const VectorField f = projected_field(lagrangian(lp));
  // y = 1e-4 heading down quickly: Euler would overshoot below zero
  const Vec s = step(f, vec({5, 1e-4}), 0.1, Scheme::Euler);
  CHECK(s[1] == 0.0);
}

TEST_CASE("non-finite field values throw") {
  VectorField f = zero_field(1);
  f.eval = [](const Vec&) { return vec({std::nan("")}); };
  CHECK_THROWS_AS(step(f, vec({0}), 0.1, Scheme::Rk4), Diverged);
}

TEST_CASE("integrate: equilibrium converges in the first window") {
  IntegratorConfig cfg;
  cfg.conv_window = 3;
  cfg.record_stride = 5;
  const auto r = integrate(regularized_field(bilinear_problem(), {1.0}), Vec::Zero(4), cfg);
  CHECK(r.stop.tag == StopTag::Converged);
  CHECK(r.trajectory.size() == 3);
  CHECK(r.stop.final_residual == 0.0);
  CHECK(r.trajectory.times.back() == doctest::Approx(10 * cfg.dt));
}

TEST_CASE("integrate: regularized bilinear matches the matrix exponential") {
  IntegratorConfig cfg;
  cfg.t_max = 200.0;
  const Vec init = vec({1, 0, 0, 0});
  const auto r = integrate(regularized_field(bilinear_problem(), {1.0}), init, cfg);
  CHECK(r.stop.tag == StopTag::Converged);
  CHECK(r.stop.final_residual <= cfg.conv_tol);
  CHECK(r.trajectory.final_state().norm() <= 1e-7);

  const Mat m = oracle::regularized_bilinear_matrix(1.0);
  double worst = 0.0;
  for (std::size_t k = 0; k < r.trajectory.size(); k += 7) {
    worst = std::max(worst, (r.trajectory.states[k] -
                             oracle::linear_flow(m, init, r.trajectory.times[k]))
                                .norm());
  }
  CHECK(worst <= 1e-10);
}

TEST_CASE("integrate: plain bilinear never settles") {
  IntegratorConfig cfg;
  cfg.t_max = 200.0;
  const auto r = integrate(plain_field(bilinear_problem()), vec({1, 0}), cfg);
  CHECK(r.stop.tag == StopTag::HorizonReached);
  CHECK(r.stop.final_time == doctest::Approx(200.0));
  CHECK(r.trajectory.final_state().norm() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("integrate: recording layout") {
  IntegratorConfig cfg;
  cfg.t_max = 1.05;
  cfg.dt = 0.01;
  cfg.record_stride = 10;
  const auto r = integrate(plain_field(bilinear_problem()), vec({1, 0}), cfg);
  const auto& t = r.trajectory.times;
  CHECK(t.front() == 0.0);
  for (std::size_t k = 1; k < t.size(); ++k) CHECK(t[k] > t[k - 1]);
  // samples at steps 0, 10, ..., 100 plus the final step 105
  CHECK(t.size() == 12);
  CHECK(t.back() == doctest::Approx(1.05));
  for (const Vec& s : r.trajectory.states) CHECK(s.size() == 2);
}

TEST_CASE("integrate: deterministic") {
  IntegratorConfig cfg;
  cfg.t_max = 20.0;
  const VectorField f = regularized_field(coupled_quadratic_problem(), {2.0});
  const auto a = integrate(f, vec({1, -1, 2, 0.5}), cfg);
  const auto b = integrate(f, vec({1, -1, 2, 0.5}), cfg);
  REQUIRE(a.trajectory.size() == b.trajectory.size());
  for (std::size_t k = 0; k < a.trajectory.size(); ++k) {
    CHECK(a.trajectory.times[k] == b.trajectory.times[k]);
    CHECK(a.trajectory.states[k] == b.trajectory.states[k]);
  }
}

TEST_CASE("integrate: orthant maintained and bad init rejected") {
  LinearProgram lp{vec({1}), Mat::Constant(1, 1, -1), vec({-1})};
  IntegratorConfig cfg;
  cfg.t_max = 30.0;
  cfg.record_stride = 1;
  const VectorField f = projected_field(lagrangian(lp));
  const auto r = integrate(f, vec({3, 0}), cfg);
  for (const Vec& s : r.trajectory.states) CHECK(s[1] >= 0.0);
  CHECK_THROWS_AS(integrate(f, vec({0, -0.1}), cfg), InvalidInit);
  CHECK_THROWS_AS(integrate(f, vec({0, 0, 0}), cfg), DimensionMismatch);
}

TEST_CASE("integrate: divergence is a stop reason") {
  VectorField f;
  f.dimension = 1;
  f.eval = [](const Vec& s) { return Vec(s * 50.0); };
  IntegratorConfig cfg;
  cfg.t_max = 10.0;
  const auto r = integrate(f, vec({1}), cfg);
  CHECK(r.stop.tag == StopTag::Diverged);
  CHECK(r.trajectory.times.back() < 10.0);

  f.eval = [](const Vec& s) { return s[0] > 2.0 ? vec({std::nan("")}) : vec({1.0}); };
  const auto n = integrate(f, vec({0}), cfg);
  CHECK(n.stop.tag == StopTag::Diverged);
}

TEST_CASE("integrator config validation") {
  IntegratorConfig cfg;
  cfg.dt = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.dt = 3.0;
  cfg.t_max = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.conv_window = 0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  CHECK(scheme_from_string("euler") == Scheme::Euler);
  CHECK_THROWS_AS(scheme_from_string("rk45"), InvalidArgument);
}
