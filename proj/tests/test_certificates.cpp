#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "saddleflow/builtins.hpp"
#include "saddleflow/certificates.hpp"
#include "saddleflow/errors.hpp"

using namespace saddleflow;

namespace {
Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) out[i++] = a;
  return out;
}
const LyapunovReference kOrigin{vec({0}), vec({0}), ReferenceSource::UserSupplied};
}  // namespace

TEST_CASE("lyapunov value") {
  const LyapunovReference ref{vec({1, 1}), vec({2}), ReferenceSource::UserSupplied};
  CHECK(lyapunov_value(ref, ref.point()) == 0.0);
  CHECK(lyapunov_value(ref, {vec({4, 5}), vec({2})}) == 12.5);
  const LyapunovReference other{vec({4, 5}), vec({2}), ReferenceSource::UserSupplied};
  CHECK(lyapunov_value(other, ref.point()) == 12.5);
  CHECK_THROWS_AS(lyapunov_value(ref, {vec({1}), vec({2})}), DimensionMismatch);
}

TEST_CASE("oracle reference requires a stationary point") {
  CHECK(oracle_reference(bilinear_problem(), {vec({0}), vec({0})}).source ==
        ReferenceSource::OracleSolver);
  CHECK_THROWS_AS(oracle_reference(bilinear_problem(), {vec({1}), vec({0})}), InvalidArgument);
}

TEST_CASE("strict certificate") {
  const SaddleProblem q = quadratic_problem();
  const CertificateValue z = certificate_strict(q, kOrigin, kOrigin.point());
  CHECK(z.h1 == 0.0);
  CHECK(z.h2 == 0.0);
  const CertificateValue h = certificate_strict(q, kOrigin, {vec({2}), vec({1})});
  CHECK(h.h1 == doctest::Approx(0.5));
  CHECK(h.h2 == doctest::Approx(2.0));
  CHECK_THROWS_AS(certificate_strict(bilinear_problem(), kOrigin, kOrigin.point()),
                  UnsupportedOperation);
  SaddleProblem no_value = q;
  no_value.value = nullptr;
  CHECK_THROWS_AS(certificate_strict(no_value, kOrigin, kOrigin.point()), UnsupportedOperation);

  std::mt19937_64 rng(1);
  for (int k = 0; k < 200; ++k) {
    const PointPair p{oracle::random_vec(rng, 1, -4, 4), oracle::random_vec(rng, 1, -4, 4)};
    const CertificateValue c = certificate_strict(coupled_quadratic_problem(), kOrigin, p);
    CHECK(c.h1 >= 0.0);
    CHECK(c.h2 >= 0.0);
  }
}

TEST_CASE("separable certificate") {
  const CertificateValue a = certificate_separable({1.0}, {vec({5}), vec({5}), vec({1}), vec({1})});
  CHECK(a.h1 == 0.0);
  CHECK(a.h2 == 0.0);
  const CertificateValue b = certificate_separable({1.0}, {vec({2}), vec({0}), vec({1}), vec({1})});
  CHECK(b.h1 == 0.0);
  CHECK(b.h2 == 2.0);
  const CertificateValue c = certificate_separable({3.0}, {vec({1}), vec({0}), vec({3}), vec({0})});
  CHECK(c.h1 == doctest::Approx(1.5));
  CHECK(c.h2 == doctest::Approx(1.0 / 6.0));
  CHECK_THROWS_AS(certificate_separable({0.0}, {vec({1}), vec({0}), vec({3}), vec({0})}),
                  InvalidArgument);
}

TEST_CASE("zero separable certificate means no virtual drift") {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 20; ++k) {
    const PointPair p{oracle::random_vec(rng, 1), oracle::random_vec(rng, 1)};
    const AugmentedState st = AugmentedState::aligned(p);
    const CertificateValue h = certificate_separable({2.0}, st);
    REQUIRE(h.h1 == 0.0);
    REQUIRE(h.h2 == 0.0);
    const Vec f = regularized_field(coupled_quadratic_problem(), {2.0})(st.pack());
    CHECK(f[1] == 0.0);
    CHECK(f[3] == 0.0);
  }
}

TEST_CASE("proximal certificate") {
  const SaddleProblem b = bilinear_problem();
  const CertificateValue zero = certificate_proximal(b, kOrigin, vec({0}), vec({0}));
  CHECK(zero.h1 == doctest::Approx(0.0));
  CHECK(zero.h2 == doctest::Approx(0.0));
  const CertificateValue h = certificate_proximal(b, kOrigin, vec({0}), vec({1}));
  CHECK(h.h1 == doctest::Approx(0.5));
  CHECK(h.h2 == doctest::Approx(0.0));
}

TEST_CASE("sandwich check") {
  const SaddleProblem q = quadratic_problem();
  std::mt19937_64 rng(31);
  for (int k = 0; k < 100; ++k) {
    const PointPair p{oracle::random_vec(rng, 1), oracle::random_vec(rng, 1)};
    CHECK(sandwich_check(q, kOrigin, p, {0.0, 0.0}).passed());
    CHECK(sandwich_check(q, kOrigin, p, certificate_strict(q, kOrigin, p)).passed());
  }
  // separable certificate against the augmented problem's saddle gap
  const SaddleProblem aug = augment(bilinear_problem(), {1.0});
  const LyapunovReference ref{Vec::Zero(2), Vec::Zero(2), ReferenceSource::UserSupplied};
  for (int k = 0; k < 1000; ++k) {
    const Vec s = oracle::random_vec(rng, 4, -3, 3);
    const AugmentedState st = AugmentedState::unpack(s, 1, 1);
    const CertificateValue h = certificate_separable({1.0}, st);
    CHECK(sandwich_check(aug, ref, {s.head(2), s.tail(2)}, h).passed());
  }
  // h above the bound fails and reports the excess
  const auto bad = sandwich_check(q, kOrigin, {vec({1}), vec({0})}, {0.0, 1.0});
  CHECK_FALSE(bad.passed());
  CHECK(bad.worst_violation == doctest::Approx(0.5));
  CHECK_FALSE(sandwich_check(q, kOrigin, {vec({1}), vec({0})}, {-1e-6, 0.0}).passed());

  SaddleProblem no_value = q;
  no_value.value = nullptr;
  CHECK_THROWS_AS(sandwich_check(no_value, kOrigin, kOrigin.point(), {}), UnsupportedOperation);
}

TEST_CASE("trajectory monitor") {
  IntegratorConfig cfg;
  cfg.t_max = 1.0;
  cfg.record_stride = 10;

  SUBCASE("stationary trajectory at the saddle") {
    const VectorField f = plain_field(quadratic_problem());
    IntegrationResult r = integrate(f, vec({0, 0}), cfg);
    MonitorContext ctx{quadratic_problem(), f, kOrigin, CertificateKind::Strict, {}};
    const MonitorReport m = trajectory_monitor(ctx, r.trajectory);
    CHECK(m.max_lyapunov_increase == 0.0);
    CHECK(m.terminal_h.h1 == 0.0);
    CHECK(m.terminal_h.h2 == 0.0);
    CHECK(r.trajectory.has_aux());
  }

  SUBCASE("regularized bilinear decays") {
    cfg.t_max = 200.0;
    const VectorField f = regularized_field(bilinear_problem(), {1.0});
    IntegrationResult r = integrate(f, vec({1, 0, 0, 0}), cfg);
    MonitorContext ctx{bilinear_problem(), f, kOrigin, CertificateKind::Separable, {}};
    const MonitorReport m = trajectory_monitor(ctx, r.trajectory);
    CHECK(m.terminal_h.h1 <= 1e-8);
    CHECK(m.terminal_h.h2 <= 1e-8);
    CHECK(m.max_lyapunov_increase <= 1e-8);
    CHECK(m.max_lyapunov_derivative <= 1e-12);
    CHECK(m.initial_lyapunov == doctest::Approx(0.5));
    CHECK(m.terminal_residual <= 1e-8);
  }

  SUBCASE("plain bilinear keeps V and a unit residual") {
    cfg.t_max = 50.0;
    const VectorField f = plain_field(bilinear_problem());
    IntegrationResult r = integrate(f, vec({1, 0}), cfg);
    MonitorContext ctx{bilinear_problem(), f, kOrigin, CertificateKind::None, {}};
    const MonitorReport m = trajectory_monitor(ctx, r.trajectory);
    CHECK(std::abs(m.terminal_lyapunov - 0.5) <= 1e-9);
    CHECK(std::abs(m.max_lyapunov_increase) <= 1e-9);
    CHECK(m.terminal_residual == doctest::Approx(1.0).epsilon(1e-9));
    // the saddle gap of x y at the reference origin is identically zero
    for (const Vec& s : r.trajectory.states) {
      const CertificateValue g = saddle_gap(bilinear_problem(), kOrigin, {s.head(1), s.tail(1)});
      CHECK(g.h1 == 0.0);
      CHECK(g.h2 == 0.0);
    }
  }
}
