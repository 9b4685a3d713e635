#include "mlocal/simplex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mlocal::lp {
namespace {

class Tableau {
 public:
  Tableau(const LinearProgram& lp, double tol)
      : rows_(lp.rows.size()), structural_(lp.variables), cols_(lp.variables + rows_), tol_(tol) {
    data_.assign((rows_ + 1) * (cols_ + 1), 0.0);
    basis_.resize(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (lp.rows[i].size() != structural_) throw std::invalid_argument("LP row width mismatch");
      const double sign = lp.rhs[i] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < structural_; ++j) at(i, j) = sign * lp.rows[i][j];
      at(i, structural_ + i) = 1.0;
      rhs(i) = sign * lp.rhs[i];
      basis_[i] = structural_ + i;
    }
  }

  double& at(std::size_t i, std::size_t j) { return data_[i * (cols_ + 1) + j]; }
  double& rhs(std::size_t i) { return at(i, cols_); }
  double& cost(std::size_t j) { return at(rows_, j); }
  double& value() { return at(rows_, cols_); }

  bool is_artificial(std::size_t j) const { return j >= structural_; }

  // Reduced-cost row for  maximize sum_j obj[j] x_j  with the current basis.
  void load_objective(const std::vector<double>& obj) {
    for (std::size_t j = 0; j <= cols_; ++j) cost(j) = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) cost(j) = -obj[j];
    for (std::size_t i = 0; i < rows_; ++i) {
      const double cb = obj[basis_[i]];
      if (cb == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) cost(j) += cb * at(i, j);
    }
  }

  void pivot(std::size_t r, std::size_t c) {
    const double inv = 1.0 / at(r, c);
    for (std::size_t j = 0; j <= cols_; ++j) at(r, j) *= inv;
    at(r, c) = 1.0;
    for (std::size_t i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
    }
    basis_[r] = c;
  }

  // Returns false when unbounded.
  bool optimize(bool allow_artificial) {
    while (true) {
      std::size_t entering = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (!allow_artificial && is_artificial(j)) continue;
        if (cost(j) < -tol_) {
          entering = j;
          break;
        }
      }
      if (entering == cols_) return true;

      std::size_t leaving = rows_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < rows_; ++i) {
        const double a = at(i, entering);
        if (a <= tol_) continue;
        const double ratio = rhs(i) / a;
        if (ratio < best - tol_ ||
            (std::abs(ratio - best) <= tol_ && leaving < rows_ && basis_[i] < basis_[leaving])) {
          best = ratio;
          leaving = i;
        }
      }
      if (leaving == rows_) return false;
      pivot(leaving, entering);
    }
  }

  // Pivots artificial variables out of the basis; rows where that is impossible
  // are linearly dependent and get removed.
  void purge_artificials() {
    for (std::size_t i = 0; i < rows_;) {
      if (!is_artificial(basis_[i])) {
        ++i;
        continue;
      }
      std::size_t col = structural_;
      double best = tol_;
      for (std::size_t j = 0; j < structural_; ++j) {
        if (std::abs(at(i, j)) > best) {
          best = std::abs(at(i, j));
          col = j;
        }
      }
      if (col < structural_) {
        pivot(i, col);
        ++i;
      } else {
        remove_row(i);
      }
    }
  }

  std::vector<double> primal() {
    std::vector<double> x(structural_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (!is_artificial(basis_[i])) x[basis_[i]] = rhs(i);
    }
    return x;
  }

  std::size_t columns() const { return cols_; }
  std::size_t structural() const { return structural_; }

 private:
  void remove_row(std::size_t r) {
    const std::size_t width = cols_ + 1;
    data_.erase(data_.begin() + static_cast<std::ptrdiff_t>(r * width),
                data_.begin() + static_cast<std::ptrdiff_t>((r + 1) * width));
    basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    --rows_;
  }

  std::size_t rows_;
  std::size_t structural_;
  std::size_t cols_;
  double tol_;
  std::vector<double> data_;
  std::vector<std::size_t> basis_;
};

}  // namespace

Solution maximize(const LinearProgram& program, double tolerance) {
  if (program.rhs.size() != program.rows.size() ||
      program.objective.size() != program.variables) {
    throw std::invalid_argument("inconsistent LP dimensions");
  }
  Tableau t(program, tolerance);

  // Phase one: maximize -(sum of artificials).
  std::vector<double> phase_one(t.columns(), 0.0);
  for (std::size_t j = t.structural(); j < t.columns(); ++j) phase_one[j] = -1.0;
  t.load_objective(phase_one);
  t.optimize(true);
  if (t.value() < -tolerance * static_cast<double>(program.rows.size() + 1)) {
    return {Status::Infeasible, {}, 0.0};
  }
  t.purge_artificials();

  std::vector<double> phase_two(t.columns(), 0.0);
  std::copy(program.objective.begin(), program.objective.end(), phase_two.begin());
  t.load_objective(phase_two);
  if (!t.optimize(false)) return {Status::Unbounded, {}, 0.0};

  Solution s;
  s.status = Status::Optimal;
  s.x = t.primal();
  s.objective = t.value();
  return s;
}

}  // namespace mlocal::lp
