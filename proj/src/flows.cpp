#include "saddleflow/flows.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>

#include <fmt/format.h>

#include "saddleflow/errors.hpp"

namespace saddleflow {

Vec AugmentedState::pack() const {
  Vec s(x.size() + z.size() + y.size() + w.size());
  s << x, z, y, w;
  return s;
}

AugmentedState AugmentedState::unpack(const Vec& s, std::size_t n, std::size_t m) {
  const auto ni = static_cast<Eigen::Index>(n);
  const auto mi = static_cast<Eigen::Index>(m);
  if (s.size() != 2 * ni + 2 * mi) {
    throw DimensionMismatch("augmented state has size " + std::to_string(s.size()) +
                            ", expected " + std::to_string(2 * (n + m)));
  }
  return {s.segment(0, ni), s.segment(ni, ni), s.segment(2 * ni, mi),
          s.segment(2 * ni + mi, mi)};
}

AugmentedState AugmentedState::aligned(const PointPair& p) { return {p.x, p.x, p.y, p.y}; }

AugmentedState AugmentedState::zeros(std::size_t n, std::size_t m) {
  const auto ni = static_cast<Eigen::Index>(n);
  const auto mi = static_cast<Eigen::Index>(m);
  return {Vec::Zero(ni), Vec::Zero(ni), Vec::Zero(mi), Vec::Zero(mi)};
}

void RegularizationConfig::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw InvalidArgument(fmt::format("regularization coefficient rho must be finite and > 0, got {}", rho));
  }
}

const char* to_string(FlowKind kind) {
  switch (kind) {
    case FlowKind::Plain:
      return "plain";
    case FlowKind::Regularized:
      return "regularized";
    case FlowKind::Projected:
      return "projected";
    case FlowKind::ProjectedRegularized:
      return "projected-regularized";
    case FlowKind::Proximal:
      return "proximal";
  }
  return "unknown";
}

FlowKind flow_kind_from_string(const std::string& s) {
  for (FlowKind k : {FlowKind::Plain, FlowKind::Regularized, FlowKind::Projected,
                     FlowKind::ProjectedRegularized, FlowKind::Proximal}) {
    if (s == to_string(k)) return k;
  }
  throw InvalidArgument("unknown flow kind '" + s + "'");
}

bool is_projected(FlowKind kind) {
  return kind == FlowKind::Projected || kind == FlowKind::ProjectedRegularized;
}

bool is_augmented(FlowKind kind) {
  return kind == FlowKind::Regularized || kind == FlowKind::ProjectedRegularized;
}

Vec VectorField::operator()(const Vec& state) const {
  if (static_cast<std::size_t>(state.size()) != dimension) {
    throw DimensionMismatch("state has size " + std::to_string(state.size()) +
                            ", field expects " + std::to_string(dimension));
  }
  return eval(state);
}

namespace {

std::vector<bool> dual_mask(std::size_t lead, std::size_t m, std::size_t trail) {
  std::vector<bool> mask(lead + m + trail, false);
  std::fill(mask.begin() + static_cast<std::ptrdiff_t>(lead),
            mask.begin() + static_cast<std::ptrdiff_t>(lead + m), true);
  return mask;
}

// Shared by the regularized kinds. Writes the field in [x; z; y; w] layout.
Vec regularized_eval(const SaddleProblem& prob, double rho, bool projected, const Vec& s) {
  const auto n = static_cast<Eigen::Index>(prob.n);
  const auto m = static_cast<Eigen::Index>(prob.m);
  const Vec x = s.segment(0, n);
  const Vec z = s.segment(n, n);
  const Vec y = s.segment(2 * n, m);
  const Vec w = s.segment(2 * n + m, m);
  const Vec gx = prob.grad_x(x, y);
  const Vec gy = prob.grad_y(x, y);
  const Vec xz = (x - z) / rho;
  const Vec yw = (y - w) / rho;
  Vec out(s.size());
  out.segment(0, n) = -gx - xz;
  out.segment(n, n) = xz;
  if (projected) {
    out.segment(2 * n, m) = project(gy - yw, y);
  } else {
    out.segment(2 * n, m) = gy - yw;
  }
  out.segment(2 * n + m, m) = yw;
  return out;
}

Vec plain_eval(const SaddleProblem& prob, bool projected, const Vec& s) {
  const auto n = static_cast<Eigen::Index>(prob.n);
  const auto m = static_cast<Eigen::Index>(prob.m);
  const Vec x = s.segment(0, n);
  const Vec y = s.segment(n, m);
  Vec out(s.size());
  out.segment(0, n) = -prob.grad_x(x, y);
  if (projected) {
    out.segment(n, m) = project(prob.grad_y(x, y), y);
  } else {
    out.segment(n, m) = prob.grad_y(x, y);
  }
  return out;
}

}  // namespace

VectorField plain_field(const SaddleProblem& prob) {
  VectorField f;
  f.dimension = prob.n + prob.m;
  f.kind = FlowKind::Plain;
  f.n = prob.n;
  f.m = prob.m;
  f.eval = [prob](const Vec& s) { return plain_eval(prob, false, s); };
  return f;
}

SaddleProblem augment(const SaddleProblem& prob, const RegularizationConfig& cfg) {
  cfg.validate();
  const double rho = cfg.rho;
  const auto n = static_cast<Eigen::Index>(prob.n);
  const auto m = static_cast<Eigen::Index>(prob.m);
  SaddleProblem aug;
  aug.n = 2 * prob.n;
  aug.m = 2 * prob.m;
  aug.convexity = ConvexityClass::ConvexConcave;
  aug.name = prob.name + "+augmented";
  if (prob.has_value()) {
    aug.value = [prob, rho, n, m](const Vec& xz, const Vec& yw) {
      const Vec x = xz.head(n);
      const Vec y = yw.head(m);
      return (x - xz.tail(n)).squaredNorm() / (2.0 * rho) + prob.value(x, y) -
             (y - yw.tail(m)).squaredNorm() / (2.0 * rho);
    };
  }
  aug.grad_x = [prob, rho, n, m](const Vec& xz, const Vec& yw) {
    const Vec x = xz.head(n);
    const Vec d = (x - xz.tail(n)) / rho;
    Vec g(2 * n);
    g.head(n) = prob.grad_x(x, yw.head(m)) + d;
    g.tail(n) = -d;
    return g;
  };
  aug.grad_y = [prob, rho, n, m](const Vec& xz, const Vec& yw) {
    const Vec y = yw.head(m);
    const Vec d = (y - yw.tail(m)) / rho;
    Vec g(2 * m);
    g.head(m) = prob.grad_y(xz.head(n), y) - d;
    g.tail(m) = d;
    return g;
  };
  return aug;
}

VectorField regularized_field(const SaddleProblem& prob, const RegularizationConfig& cfg) {
  cfg.validate();
  VectorField f;
  f.dimension = 2 * (prob.n + prob.m);
  f.kind = FlowKind::Regularized;
  f.n = prob.n;
  f.m = prob.m;
  f.rho = cfg.rho;
  f.eval = [prob, rho = cfg.rho](const Vec& s) { return regularized_eval(prob, rho, false, s); };
  return f;
}

Vec project(const Vec& nu, const Vec& y) {
  if (nu.size() != y.size()) {
    throw DimensionMismatch("projection needs nu and y of equal size");
  }
  Vec out(nu.size());
  for (Eigen::Index i = 0; i < nu.size(); ++i) out[i] = project_component(nu[i], y[i]);
  return out;
}

VectorField projected_field(const SaddleProblem& prob) {
  VectorField f;
  f.dimension = prob.n + prob.m;
  f.kind = FlowKind::Projected;
  f.n = prob.n;
  f.m = prob.m;
  f.nonneg_mask = dual_mask(prob.n, prob.m, 0);
  f.eval = [prob](const Vec& s) { return plain_eval(prob, true, s); };
  return f;
}

VectorField projected_regularized_field(const SaddleProblem& prob,
                                        const RegularizationConfig& cfg) {
  cfg.validate();
  VectorField f;
  f.dimension = 2 * (prob.n + prob.m);
  f.kind = FlowKind::ProjectedRegularized;
  f.n = prob.n;
  f.m = prob.m;
  f.rho = cfg.rho;
  // only y is constrained; w is not
  f.nonneg_mask = dual_mask(2 * prob.n, prob.m, prob.m);
  f.eval = [prob, rho = cfg.rho](const Vec& s) { return regularized_eval(prob, rho, true, s); };
  return f;
}

namespace {

Vec inner_gradient(const SaddleProblem& prob, const Vec& x, const Vec& z, const Vec& y) {
  return prob.grad_x(x, y) + (x - z);
}

// grad_x is affine in x: probe it column by column and solve (Q + I) d = -g(z).
Vec affine_inner_solve(const SaddleProblem& prob, const Vec& z, const Vec& y) {
  const auto n = static_cast<Eigen::Index>(prob.n);
  const Vec g0 = prob.grad_x(z, y);
  if (prob.convexity == ConvexityClass::Bilinear) return z - g0;
  Mat q(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vec zi = z;
    zi[i] += 1.0;
    q.col(i) = prob.grad_x(zi, y) - g0;
  }
  q.diagonal().array() += 1.0;
  return z - q.partialPivLu().solve(g0);
}

}  // namespace

Vec proximal_inner_argmin(const SaddleProblem& prob, const Vec& z, const Vec& y,
                          const ProximalOptions& opts) {
  check_dimensions(prob, {z, y});
  if (!(opts.tol > 0.0)) throw InvalidArgument("proximal tolerance must be > 0");

  Vec x = z;
  const bool affine = prob.convexity == ConvexityClass::Bilinear || prob.quadratic_in_x;
  if (affine) {
    x = affine_inner_solve(prob, z, y);
  } else if (!prob.has_value()) {
    throw UnsupportedOperation("proximal step on '" + prob.name +
                               "' needs a value oracle or an affine grad_x");
  }

  Vec g = inner_gradient(prob, x, z, y);
  double gnorm = g.norm();
  if (gnorm <= opts.tol) return x;

  // Gradient descent with backtracking on phi(x) = S(x, y) + |x - z|^2 / 2.
  // The closed-form paths fall through here only to polish rounding error.
  auto phi = [&](const Vec& v) {
    return prob.has_value() ? prob.value(v, y) + 0.5 * (v - z).squaredNorm() : 0.0;
  };
  double step = 1.0;
  double fx = phi(x);
  for (std::size_t it = 0; it < opts.max_iterations; ++it) {
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      const Vec trial = x - step * g;
      const Vec gt = inner_gradient(prob, trial, z, y);
      const double ft = phi(trial);
      const double gtn = gt.norm();
      // Armijo decrease while it is resolvable in double precision, otherwise
      // a strict drop in the gradient norm.
      const double drop = 0.5 * step * gnorm * gnorm;
      const bool resolvable = prob.has_value() && drop > 1e-13 * (1.0 + std::abs(fx));
      if ((resolvable && ft <= fx - drop) || (!resolvable && gtn < gnorm)) {
        x = trial;
        g = gt;
        fx = ft;
        gnorm = gtn;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (gnorm <= opts.tol) return x;
    if (!accepted) break;
    step = std::min(2.0 * step, 1.0);
  }
  throw NoConvergence(fmt::format("proximal inner minimization did not reach tol {:g} (residual {:.3e})",
                                  opts.tol, gnorm),
                      x, gnorm);
}

SaddleProblem proximal_surrogate(const SaddleProblem& prob, const ProximalOptions& opts) {
  SaddleProblem sur;
  sur.n = prob.n;
  sur.m = prob.m;
  sur.convexity = ConvexityClass::ConvexConcave;
  sur.name = prob.name + "+proximal";
  if (prob.has_value()) {
    sur.value = [prob, opts](const Vec& z, const Vec& y) {
      const Vec xb = proximal_inner_argmin(prob, z, y, opts);
      return prob.value(xb, y) + 0.5 * (xb - z).squaredNorm();
    };
  }
  sur.grad_x = [prob, opts](const Vec& z, const Vec& y) {
    return Vec(z - proximal_inner_argmin(prob, z, y, opts));
  };
  sur.grad_y = [prob, opts](const Vec& z, const Vec& y) {
    return prob.grad_y(proximal_inner_argmin(prob, z, y, opts), y);
  };
  return sur;
}

VectorField proximal_field(const SaddleProblem& prob, const ProximalOptions& opts) {
  if (!prob.has_value() && !(prob.convexity == ConvexityClass::Bilinear || prob.quadratic_in_x)) {
    throw UnsupportedOperation("proximal field on '" + prob.name + "' needs a value oracle");
  }
  const auto n = static_cast<Eigen::Index>(prob.n);
  const auto m = static_cast<Eigen::Index>(prob.m);
  VectorField f;
  f.dimension = prob.n + prob.m;
  f.kind = FlowKind::Proximal;
  f.n = prob.n;
  f.m = prob.m;
  f.eval = [prob, opts, n, m](const Vec& s) {
    const Vec z = s.head(n);
    const Vec y = s.tail(m);
    const Vec xb = proximal_inner_argmin(prob, z, y, opts);
    Vec out(s.size());
    out.head(n) = xb - z;
    out.tail(m) = prob.grad_y(xb, y);
    return out;
  };
  return f;
}

PointPair extract_original_saddle(const AugmentedState& st, double tol) {
  if (st.x.size() != st.z.size() || st.y.size() != st.w.size()) {
    throw DimensionMismatch("virtual variables must match the original dimensions");
  }
  const double xg = (st.x - st.z).norm();
  const double yg = (st.y - st.w).norm();
  if (!(xg <= tol) || !(yg <= tol)) {
    throw NotConverged(fmt::format("virtual variables not aligned: |x - z| = {:.3e}, "
                                   "|y - w| = {:.3e}, tol {:g}",
                                   xg, yg, tol),
                       xg, yg);
  }
  return {st.x, st.y};
}

}  // namespace saddleflow
