#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ed4/assignment.hpp"
#include "ed4/error.hpp"
#include "ed4/random.hpp"

using namespace ed4;

namespace {

SquareMatrix random_matrix(RandomStream& rng, std::size_t n) {
  SquareMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rng.uniform();
  }
  return m;
}

// Exhaustive search written independently of the library: first permutation
// in lexicographic order reaching the exact maximum.
std::pair<double, std::vector<int>> exhaustive_best(const SquareMatrix& m) {
  std::vector<int> perm(m.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = -1.0;
  std::vector<int> arg;
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) s += m(i, static_cast<std::size_t>(perm[i]));
    if (s > best) {
      best = s;
      arg = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {best, arg};
}

}  // namespace

TEST(Hungarian, DominantDiagonal) {
  const SquareMatrix raw{{0.9, 0.1}, {0.2, 0.8}};
  const AssignmentMatrix a = hungarian_assign(ScoreMatrix(raw));
  EXPECT_EQ(a.mapping(), (std::vector<int>{0, 1}));
  EXPECT_NEAR(assignment_score(raw, a), 1.7, 1e-15);
}

TEST(Hungarian, AntiDiagonal) {
  const SquareMatrix raw{{0.1, 0.9}, {0.8, 0.2}};
  const AssignmentMatrix a = hungarian_assign(ScoreMatrix(raw));
  EXPECT_EQ(a.mapping(), (std::vector<int>{1, 0}));
  EXPECT_NEAR(assignment_score(raw, a), 1.7, 1e-15);
}

TEST(Hungarian, GreedyTrap) {
  const SquareMatrix raw{{0.9, 0.8, 0.1}, {0.85, 0.1, 0.2}, {0.1, 0.7, 0.3}};
  const AssignmentMatrix a = hungarian_assign(raw);
  EXPECT_EQ(a.mapping(), (std::vector<int>{1, 0, 2}));
  EXPECT_NEAR(assignment_score(raw, a), 1.95, 1e-12);
  // Row-normalised scores keep the same optimum.
  EXPECT_EQ(hungarian_assign(ScoreMatrix(raw)).mapping(), (std::vector<int>{1, 0, 2}));
  // Greedy row-by-row picking would take 0->0, 1->2, 2->1 for 1.8.
  EXPECT_NEAR(raw(0, 0) + raw(1, 2) + raw(2, 1), 1.8, 1e-12);
}

TEST(Hungarian, MatchesExhaustiveSearch) {
  RandomStream rng(61);
  for (std::size_t n = 2; n <= 8; ++n) {
    const int trials = n <= 6 ? 200 : 40;
    for (int t = 0; t < trials; ++t) {
      const ScoreMatrix m(random_matrix(rng, n));
      const auto [best, arg] = exhaustive_best(m.matrix());
      const AssignmentMatrix h = hungarian_assign(m);
      ASSERT_NEAR(assignment_score(m.matrix(), h), best, 1e-9) << "N=" << n;
    }
  }
}

TEST(Hungarian, TieBreakIsLexicographicallySmallest) {
  RandomStream rng(62);
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 2 + rng.below(5);
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) m(i, j) = static_cast<double>(rng.below(3));
    }
    bool zero_row = false;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (double v : m.row(i)) s += v;
      zero_row = zero_row || s == 0.0;
    }
    const auto [best, arg] = exhaustive_best(m);
    ASSERT_EQ(hungarian_assign(m).mapping(), arg);
    ASSERT_EQ(brute_force_assign(m).mapping(), arg);
    if (!zero_row) ASSERT_EQ(hungarian_assign(ScoreMatrix(m)), brute_force_assign(ScoreMatrix(m)));
  }
}

TEST(Hungarian, UniformScoresGiveIdentity) {
  for (std::size_t n : {1u, 2u, 5u, 16u, 64u}) {
    const ScoreMatrix m(SquareMatrix(n, 1.0));
    EXPECT_EQ(hungarian_assign(m), AssignmentMatrix::identity(n));
  }
}

TEST(Hungarian, ScaleInvariant) {
  RandomStream rng(63);
  for (int t = 0; t < 50; ++t) {
    const SquareMatrix m = random_matrix(rng, 7);
    SquareMatrix scaled = m;
    const double c = rng.uniform(0.01, 100.0);
    for (std::size_t i = 0; i < 7; ++i) {
      for (std::size_t j = 0; j < 7; ++j) scaled(i, j) = m(i, j) * c;
    }
    EXPECT_EQ(hungarian_assign(m), hungarian_assign(scaled));
  }
}

TEST(Hungarian, OutputIsPermutationMatrix) {
  RandomStream rng(64);
  for (std::size_t n : {3u, 16u, 64u}) {
    const SquareMatrix dense = hungarian_assign(ScoreMatrix(random_matrix(rng, n))).dense();
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0, col = 0;
      for (std::size_t j = 0; j < n; ++j) {
        row += dense(i, j);
        col += dense(j, i);
      }
      EXPECT_EQ(row, 1.0);
      EXPECT_EQ(col, 1.0);
    }
  }
}

TEST(Hungarian, RejectsInvalidEntries) {
  EXPECT_THROW(hungarian_assign(SquareMatrix{{0.5, std::nan("")}, {0.1, 0.2}}), DomainError);
  EXPECT_THROW(hungarian_assign(SquareMatrix{{0.5, -0.1}, {0.1, 0.2}}), DomainError);
  EXPECT_THROW(ScoreMatrix(SquareMatrix{{0.5, -0.1}, {0.1, 0.2}}), DomainError);
  EXPECT_THROW(ScoreMatrix(SquareMatrix{{0.0, 0.0}, {0.1, 0.2}}), DomainError);
}

TEST(BruteForce, PermutationMatrixReturnsItself) {
  RandomStream rng(65);
  for (int t = 0; t < 20; ++t) {
    std::vector<int> map(6);
    std::iota(map.begin(), map.end(), 0);
    for (std::size_t i = map.size() - 1; i > 0; --i) std::swap(map[i], map[rng.below(i + 1)]);
    const AssignmentMatrix p = AssignmentMatrix::from_mapping(map);
    EXPECT_EQ(brute_force_assign(p.dense()), p);
    EXPECT_EQ(hungarian_assign(p.dense()), p);
  }
}

TEST(BruteForce, RefusesLargeInputs) {
  EXPECT_THROW(brute_force_assign(SquareMatrix(10, 1.0)), DomainError);
  EXPECT_NO_THROW(brute_force_assign(SquareMatrix(2, 1.0)));
}

TEST(ScoreMatrix, RowsNormalisedAndFloored) {
  const ScoreMatrix m(SquareMatrix{{2.0, 0.0}, {1.0, 3.0}});
  EXPECT_DOUBLE_EQ(m(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(m(0, 1), ScoreMatrix::kDefaultFloor);
  EXPECT_DOUBLE_EQ(m(1, 0), 0.25);
  EXPECT_DOUBLE_EQ(m(1, 1), 0.75);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(m(i, 0) + m(i, 1), 1.0, 1e-6);
}

TEST(AssignmentMatrix, ValidatesStructure) {
  EXPECT_NO_THROW(AssignmentMatrix(SquareMatrix{{0, 1}, {1, 0}}));
  EXPECT_THROW(AssignmentMatrix(SquareMatrix{{1, 1}, {0, 0}}), DomainError);
  EXPECT_THROW(AssignmentMatrix(SquareMatrix{{1, 0}, {1, 0}}), DomainError);
  EXPECT_THROW(AssignmentMatrix(SquareMatrix{{0.5, 0}, {0, 1}}), DomainError);
  EXPECT_THROW(AssignmentMatrix::from_mapping({0, 0}), DomainError);
}

TEST(PermutationFromMatrix, Conversions) {
  EXPECT_TRUE(permutation_from_matrix(AssignmentMatrix::identity(4)).is_identity());
  // Anti-diagonal row -> column mapping (2, 1, 0); three slots do not form a grid.
  const AssignmentMatrix anti(SquareMatrix{{0, 0, 1}, {0, 1, 0}, {1, 0, 0}});
  EXPECT_EQ(anti.mapping(), (std::vector<int>{2, 1, 0}));
  EXPECT_THROW(permutation_from_matrix(anti), DomainError);
  const AssignmentMatrix anti9 = AssignmentMatrix::from_mapping({8, 7, 6, 5, 4, 3, 2, 1, 0});
  EXPECT_EQ(permutation_from_matrix(anti9).mapping(), anti9.mapping());
  RandomStream rng(66);
  for (int t = 0; t < 20; ++t) {
    const GridPermutation p = random_permutation(rng, 3);
    EXPECT_EQ(permutation_from_matrix(matrix_from_permutation(p)), p);
  }
}

TEST(AssignmentScore, SizeMismatchThrows) {
  EXPECT_THROW(assignment_score(SquareMatrix(3, 1.0), AssignmentMatrix::identity(2)), DomainError);
}
