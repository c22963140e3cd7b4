#include "ed4/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ed4/error.hpp"

namespace ed4 {
namespace {

void check_scores(const SquareMatrix& scores) {
  if (scores.size() == 0) throw DomainError("score matrix is empty");
  for (double x : scores.values()) {
    if (std::isnan(x)) throw DomainError("score matrix contains NaN");
    if (!std::isfinite(x)) throw DomainError("score matrix contains an infinite entry");
    if (x < 0.0) throw DomainError("score matrix contains a negative entry");
  }
}

double max_abs(const SquareMatrix& m) {
  double s = 0.0;
  for (double x : m.values()) s = std::max(s, std::abs(x));
  return s;
}

// Two entries closer than this (relative to the largest magnitude) are a tie.
constexpr double kRelativeTieTolerance = 1e-12;

// Shortest-augmenting-path Hungarian method for min-cost perfect matching.
// Fills row/column potentials (1-based, index 0 unused) such that
// cost(i, j) - u[i] - v[j] >= 0 with equality on the returned matching.
std::vector<int> min_cost_matching(const SquareMatrix& cost, std::vector<double>& u,
                                   std::vector<double>& v) {
  const std::size_t n = cost.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  u.assign(n + 1, 0.0);
  v.assign(n + 1, 0.0);
  std::vector<std::size_t> col_owner(n + 1, 0), way(n + 1, 0);
  std::vector<double> min_slack(n + 1);
  std::vector<char> used(n + 1);

  for (std::size_t i = 1; i <= n; ++i) {
    col_owner[0] = i;
    std::size_t j0 = 0;
    std::fill(min_slack.begin(), min_slack.end(), kInf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = col_owner[j0];
      double delta = kInf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < min_slack[j]) {
          min_slack[j] = cur;
          way[j] = j0;
        }
        if (min_slack[j] < delta) {
          delta = min_slack[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[col_owner[j]] += delta;
          v[j] -= delta;
        } else {
          min_slack[j] -= delta;
        }
      }
      j0 = j1;
    } while (col_owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      col_owner[j0] = col_owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(n, -1);
  for (std::size_t j = 1; j <= n; ++j) {
    row_to_col[col_owner[j] - 1] = static_cast<int>(j - 1);
  }
  return row_to_col;
}

// Every optimal assignment uses only edges that are tight under an optimal
// dual, so the lexicographically smallest optimum is the lexicographically
// smallest perfect matching of the tight-edge graph. Rows are fixed in order;
// for each row the smallest tight column reachable by an alternating path
// through the unfixed rows is taken.
class LexicographicRepair {
 public:
  LexicographicRepair(std::vector<std::vector<int>> tight, std::vector<int> row_to_col)
      : tight_(std::move(tight)), row_to_col_(std::move(row_to_col)) {
    col_to_row_.assign(row_to_col_.size(), -1);
    for (std::size_t r = 0; r < row_to_col_.size(); ++r) {
      col_to_row_[static_cast<std::size_t>(row_to_col_[r])] = static_cast<int>(r);
    }
  }

  std::vector<int> run() {
    const int n = static_cast<int>(row_to_col_.size());
    for (int i = 0; i < n; ++i) {
      for (int c : tight_[static_cast<std::size_t>(i)]) {
        if (c >= row_to_col_[static_cast<std::size_t>(i)]) break;
        const int owner = col_to_row_[static_cast<std::size_t>(c)];
        if (owner < i) continue;
        fixed_upto_ = i;
        taken_ = c;
        freed_ = row_to_col_[static_cast<std::size_t>(i)];
        visited_.assign(row_to_col_.size(), 0);
        if (reroute(owner)) {
          row_to_col_[static_cast<std::size_t>(i)] = c;
          col_to_row_[static_cast<std::size_t>(c)] = i;
          break;
        }
      }
    }
    return row_to_col_;
  }

 private:
  // Finds an alternating path from `row` to the freed column using rows
  // after fixed_upto_, never touching the column just taken.
  bool reroute(int row) {
    for (int col : tight_[static_cast<std::size_t>(row)]) {
      const auto uc = static_cast<std::size_t>(col);
      if (col == taken_ || visited_[uc]) continue;
      visited_[uc] = 1;
      const int owner = col_to_row_[uc];
      if (col == freed_ || (owner > fixed_upto_ && reroute(owner))) {
        row_to_col_[static_cast<std::size_t>(row)] = col;
        col_to_row_[uc] = row;
        return true;
      }
    }
    return false;
  }

  std::vector<std::vector<int>> tight_;
  std::vector<int> row_to_col_;
  std::vector<int> col_to_row_;
  std::vector<char> visited_;
  int fixed_upto_ = 0;
  int taken_ = -1;
  int freed_ = -1;
};

AssignmentMatrix solve_max(const SquareMatrix& scores) {
  const std::size_t n = scores.size();
  SquareMatrix cost(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) cost(i, j) = -scores(i, j);

  std::vector<double> u, v;
  std::vector<int> row_to_col = min_cost_matching(cost, u, v);

  const double tol = kRelativeTieTolerance * max_abs(scores);
  std::vector<std::vector<int>> tight(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const bool matched = row_to_col[i] == static_cast<int>(j);
      if (matched || cost(i, j) - u[i + 1] - v[j + 1] <= tol) {
        tight[i].push_back(static_cast<int>(j));
      }
    }
  }
  return AssignmentMatrix::from_mapping(
      LexicographicRepair(std::move(tight), std::move(row_to_col)).run());
}

AssignmentMatrix brute_force_max(const SquareMatrix& scores) {
  const std::size_t n = scores.size();
  if (n > kBruteForceMaxSize) {
    throw DomainError("brute-force assignment refused for N=" + std::to_string(n) +
                      " (limit " + std::to_string(kBruteForceMaxSize) + ")");
  }
  const double tol = kRelativeTieTolerance * max_abs(scores) * static_cast<double>(n);
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_score = -std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += scores(i, static_cast<std::size_t>(perm[i]));
    if (s > best_score + tol) {
      best_score = s;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return AssignmentMatrix::from_mapping(std::move(best));
}

}  // namespace

SquareMatrix::SquareMatrix(std::size_t n, std::vector<double> values)
    : n_(n), values_(std::move(values)) {
  if (values_.size() != n * n) {
    throw DomainError("square matrix of size " + std::to_string(n) + " needs " +
                      std::to_string(n * n) + " values, got " + std::to_string(values_.size()));
  }
}

SquareMatrix::SquareMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : n_(rows.size()) {
  values_.reserve(n_ * n_);
  for (const auto& r : rows) {
    if (r.size() != n_) throw DomainError("square matrix rows must all have N entries");
    values_.insert(values_.end(), r.begin(), r.end());
  }
}

ScoreMatrix::ScoreMatrix(const SquareMatrix& raw, double floor) : m_(raw) {
  check_scores(raw);
  if (!(floor >= 0.0 && floor < 1.0)) throw DomainError("score floor must lie in [0, 1)");
  const std::size_t n = raw.size();
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (double x : raw.row(i)) sum += x;
    if (!(sum > 0.0)) {
      throw DomainError("score matrix row " + std::to_string(i) + " sums to zero");
    }
    for (std::size_t j = 0; j < n; ++j) m_(i, j) = std::max(raw(i, j) / sum, floor);
  }
}

AssignmentMatrix::AssignmentMatrix(const SquareMatrix& bits) {
  const std::size_t n = bits.size();
  if (n == 0) throw DomainError("assignment matrix is empty");
  row_to_col_.assign(n, -1);
  std::vector<int> col_hits(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double b = bits(i, j);
      if (b == 1.0) {
        if (row_to_col_[i] != -1) {
          throw DomainError("assignment row " + std::to_string(i) + " holds more than one 1");
        }
        row_to_col_[i] = static_cast<int>(j);
        ++col_hits[j];
      } else if (b != 0.0) {
        throw DomainError("assignment matrix entries must be 0 or 1");
      }
    }
    if (row_to_col_[i] == -1) {
      throw DomainError("assignment row " + std::to_string(i) + " holds no 1");
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (col_hits[j] != 1) {
      throw DomainError("assignment column " + std::to_string(j) + " must hold exactly one 1");
    }
  }
}

AssignmentMatrix AssignmentMatrix::from_mapping(std::vector<int> row_to_col) {
  const std::size_t n = row_to_col.size();
  if (n == 0) throw DomainError("assignment mapping is empty");
  std::vector<char> seen(n, 0);
  for (int c : row_to_col) {
    if (c < 0 || static_cast<std::size_t>(c) >= n || seen[static_cast<std::size_t>(c)]) {
      throw DomainError("assignment mapping is not a permutation");
    }
    seen[static_cast<std::size_t>(c)] = 1;
  }
  AssignmentMatrix out;
  out.row_to_col_ = std::move(row_to_col);
  return out;
}

AssignmentMatrix AssignmentMatrix::identity(std::size_t n) {
  std::vector<int> mapping(n);
  std::iota(mapping.begin(), mapping.end(), 0);
  return from_mapping(std::move(mapping));
}

SquareMatrix AssignmentMatrix::dense() const {
  SquareMatrix out(size());
  for (std::size_t i = 0; i < size(); ++i) out(i, static_cast<std::size_t>(row_to_col_[i])) = 1.0;
  return out;
}

double assignment_score(const SquareMatrix& scores, const AssignmentMatrix& m_hat) {
  if (scores.size() != m_hat.size()) {
    throw DomainError("score and assignment matrices differ in size");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < m_hat.size(); ++i) {
    s += scores(i, static_cast<std::size_t>(m_hat.column_of(i)));
  }
  return s;
}

AssignmentMatrix hungarian_assign(const ScoreMatrix& m) { return solve_max(m.matrix()); }

AssignmentMatrix hungarian_assign(const SquareMatrix& scores) {
  check_scores(scores);
  return solve_max(scores);
}

AssignmentMatrix brute_force_assign(const ScoreMatrix& m) { return brute_force_max(m.matrix()); }

AssignmentMatrix brute_force_assign(const SquareMatrix& scores) {
  check_scores(scores);
  return brute_force_max(scores);
}

GridPermutation permutation_from_matrix(const AssignmentMatrix& m_hat) {
  const auto n = static_cast<int>(m_hat.size());
  int g = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
  if (g * g != n) {
    throw DomainError("assignment of size " + std::to_string(n) +
                      " does not describe a square patch grid");
  }
  return GridPermutation(g, m_hat.mapping());
}

AssignmentMatrix matrix_from_permutation(const GridPermutation& perm) {
  return AssignmentMatrix::from_mapping(perm.mapping());
}

}  // namespace ed4
