#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "ed4/shuffle.hpp"

namespace ed4 {

// Dense row-major N x N matrix of doubles.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n, double fill = 0.0) : n_(n), values_(n * n, fill) {}
  SquareMatrix(std::size_t n, std::vector<double> values);
  SquareMatrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t row, std::size_t col) const noexcept {
    return values_[row * n_ + col];
  }
  double& operator()(std::size_t row, std::size_t col) noexcept { return values_[row * n_ + col]; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> row(std::size_t r) const noexcept {
    return std::span<const double>(values_).subspan(r * n_, n_);
  }

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> values_;
};

// Generator output m: row-stochastic, every entry >= floor.
class ScoreMatrix {
 public:
  static constexpr double kDefaultFloor = 1e-8;

  // Rejects NaN, infinite or negative entries and all-zero rows; divides each
  // row by its sum, then raises entries below `floor` to `floor`. Rows then
  // sum to 1 within n * floor.
  explicit ScoreMatrix(const SquareMatrix& raw, double floor = kDefaultFloor);

  std::size_t size() const noexcept { return m_.size(); }
  double operator()(std::size_t row, std::size_t col) const noexcept { return m_(row, col); }
  const SquareMatrix& matrix() const noexcept { return m_; }

 private:
  SquareMatrix m_;
};

// Permutation matrix m_hat, stored as its row -> column mapping.
class AssignmentMatrix {
 public:
  // Throws DomainError unless `bits` has exactly one 1 per row and column and
  // zeros elsewhere.
  explicit AssignmentMatrix(const SquareMatrix& bits);
  static AssignmentMatrix from_mapping(std::vector<int> row_to_col);
  static AssignmentMatrix identity(std::size_t n);

  std::size_t size() const noexcept { return row_to_col_.size(); }
  int column_of(std::size_t row) const { return row_to_col_.at(row); }
  const std::vector<int>& mapping() const noexcept { return row_to_col_; }
  SquareMatrix dense() const;

  friend bool operator==(const AssignmentMatrix&, const AssignmentMatrix&) = default;

 private:
  AssignmentMatrix() = default;
  std::vector<int> row_to_col_;
};

// sum_{i,j} scores(i, j) * m_hat(i, j)
double assignment_score(const SquareMatrix& scores, const AssignmentMatrix& m_hat);

// Permutation matrix maximising sum m(i,j) * m_hat(i,j), via the O(N^3)
// Hungarian method on the negated scores. Among optimal assignments the
// lexicographically smallest row -> column mapping is returned.
AssignmentMatrix hungarian_assign(const ScoreMatrix& m);
// Same, on an unnormalised nonnegative matrix. NaN or negative entries throw.
AssignmentMatrix hungarian_assign(const SquareMatrix& scores);

inline constexpr std::size_t kBruteForceMaxSize = 9;

// Exhaustive search over all N! permutations in lexicographic order with the
// same objective and tie-break as hungarian_assign. Refuses N > 9.
AssignmentMatrix brute_force_assign(const ScoreMatrix& m);
AssignmentMatrix brute_force_assign(const SquareMatrix& scores);

// mapping[i] = column holding the 1 in row i. N must be a perfect square.
GridPermutation permutation_from_matrix(const AssignmentMatrix& m_hat);
AssignmentMatrix matrix_from_permutation(const GridPermutation& perm);

}  // namespace ed4
