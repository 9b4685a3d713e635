#pragma once

#include <cstddef>
#include <vector>

namespace mlocal::lp {

/// maximize c.x  subject to  A x = b,  x >= 0.
struct LinearProgram {
  std::size_t variables = 0;
  std::vector<std::vector<double>> rows;  // A, one entry per equality
  std::vector<double> rhs;                // b
  std::vector<double> objective;          // c
};

enum class Status { Optimal, Infeasible, Unbounded };

struct Solution {
  Status status = Status::Infeasible;
  std::vector<double> x;
  double objective = 0.0;
};

/// Two-phase dense-tableau simplex with Bland's anti-cycling rule. Redundant
/// equality rows are detected after phase one and dropped.
Solution maximize(const LinearProgram& program, double tolerance = 1e-9);

}  // namespace mlocal::lp
