#pragma once

#include <cstdint>
#include <string>

#include "saddleflow/lp.hpp"

namespace saddleflow {

enum class LpStatus { Optimal, Infeasible, Unbounded };

const char* to_string(LpStatus s);

struct ReferenceSolution {
  LpStatus status = LpStatus::Infeasible;
  Vec x;  // optimal vertex (a point of the optimal minimal face)
  Vec y;  // complementary dual certificate, y >= 0, c + A^T y = 0
  double objective = 0.0;
  std::uint64_t bases_examined = 0;
};

/// Upper bound on the number of row subsets reference_solve will enumerate.
inline constexpr std::uint64_t kMaxEnumeratedBases = 5'000'000;

/// Brute-force LP oracle. Enumerates every subset of rank(A) linearly
/// independent rows, solves the tight system for a basic point and a
/// complementary dual, and keeps a primal- and dual-feasible pair. With no
/// feasible basic point the LP is infeasible; with feasible points but no
/// dual-feasible basis it is unbounded. Throws UnsupportedScale when
/// C(m, rank A) exceeds kMaxEnumeratedBases.
ReferenceSolution reference_solve(const LinearProgram& lp, double tol = 1e-9);

}  // namespace saddleflow
