#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "optboost/dynamics.hpp"
#include "optboost/stumps.hpp"
#include "optboost/synth.hpp"

namespace optboost {
namespace {

using Rows = std::vector<std::vector<std::uint8_t>>;

Rows rows_of(const DichotomyMatrix& m) {
  Rows out;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out.emplace_back(m.row(r).begin(), m.row(r).end());
  }
  return out;
}

TEST(EnumerateStumps, MidpointsOnOneFeature) {
  Dataset ds({1.0, 2.0, 3.0}, 1, {1, -1, 1});
  const auto stumps = enumerate_stumps(ds);
  ASSERT_EQ(stumps.size(), 4u);
  EXPECT_EQ(stumps[0], (Stump{0, 1.5, 1}));
  EXPECT_EQ(stumps[1], (Stump{0, 1.5, -1}));
  EXPECT_EQ(stumps[2], (Stump{0, 2.5, 1}));
  EXPECT_EQ(stumps[3], (Stump{0, 2.5, -1}));
}

TEST(EnumerateStumps, CountsPerFeature) {
  // Feature 0 has 3 distinct values, feature 1 has 2, feature 2 is constant.
  Dataset ds({1, 5, 7,
              2, 5, 7,
              3, 6, 7,
              3, 6, 7},
             3, {1, -1, 1, -1});
  const auto stumps = enumerate_stumps(ds);
  EXPECT_EQ(stumps.size(), 6u);
  for (const auto& s : stumps) EXPECT_NE(s.feature, 2u);
  EXPECT_EQ(enumerate_stumps(ds, {.include_constant = true}).size(), 8u);
}

TEST(EnumerateStumps, AllConstantIsEmpty) {
  Dataset ds({4.0, 4.0}, 1, {1, -1});
  EXPECT_THROW(enumerate_stumps(ds), DataError);
}

TEST(EnumerateStumps, ConstantHypothesesPredictEverywhere) {
  Dataset ds({1.0, 2.0}, 1, {1, -1});
  const auto stumps = enumerate_stumps(ds, {.include_constant = true});
  int constants = 0;
  for (const auto& s : stumps) {
    if (!std::isinf(s.threshold)) continue;
    ++constants;
    EXPECT_EQ(s.predict(ds.row(0)), s.predict(ds.row(1)));
  }
  EXPECT_EQ(constants, 2);
}

TEST(Dichotomy, EvaluatesPredictions) {
  Dataset ds({1.0, 2.0}, 1, {1, 1});
  EXPECT_EQ(dichotomy_of(Stump{0, 1.5, 1}, ds), (std::vector<std::uint8_t>{1, 0}));
  Dataset mixed({1.0, 2.0}, 1, {-1, 1});
  EXPECT_EQ(dichotomy_of(Stump{0, 1.5, 1}, mixed), (std::vector<std::uint8_t>{0, 0}));
  EXPECT_EQ(dichotomy_of(Stump{0, 1.5, -1}, mixed), (std::vector<std::uint8_t>{1, 1}));
}

TEST(Dichotomy, PolarityFlipComplementsEveryBit) {
  const auto ds = make_two_gaussians(30, 1.0, 5);
  for (const auto& s : enumerate_stumps(ds)) {
    const auto a = dichotomy_of(s, ds);
    const auto b = dichotomy_of(Stump{s.feature, s.threshold, -s.polarity}, ds);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i] + b[i], 1);
  }
}

TEST(Deduplicate, KeepsEarliestRepresentative) {
  auto m = DichotomyMatrix::from_rows({{1, 0, 1}, {0, 1, 0}, {1, 0, 1}},
                                      {Stump{0, 1.0, 1}, Stump{0, 2.0, 1}, Stump{1, 3.0, -1}});
  const auto d = deduplicate(m);
  EXPECT_EQ(d.rows(), 2u);
  EXPECT_EQ(rows_of(d), (Rows{{1, 0, 1}, {0, 1, 0}}));
  EXPECT_EQ(d.representative(0), (Stump{0, 1.0, 1}));
}

TEST(Prune, RemovesStrictSupersets) {
  EXPECT_EQ(rows_of(prune(DichotomyMatrix::from_rows({{1, 1, 0}, {1, 0, 0}}))),
            (Rows{{1, 0, 0}}));
  EXPECT_EQ(rows_of(prune(DichotomyMatrix::from_rows({{1, 0, 0}, {0, 1, 0}}))),
            (Rows{{1, 0, 0}, {0, 1, 0}}));
  EXPECT_EQ(rows_of(prune(DichotomyMatrix::from_rows({{1, 1, 1}, {1, 0, 1}, {0, 0, 1}}))),
            (Rows{{0, 0, 1}}));
}

TEST(Prune, WorksAcrossWordBoundaries) {
  const std::size_t m = 130;
  std::vector<std::uint8_t> a(m, 0), b(m, 0), c(m, 0);
  a[0] = a[129] = 1;
  b[0] = b[129] = b[64] = 1;  // superset of a
  c[64] = 1;
  const auto p = prune(DichotomyMatrix::from_rows({a, b, c}));
  EXPECT_EQ(rows_of(p), (Rows{a, c}));
}

TEST(BuildMatrix, FlipPairsSurviveWhenIncomparable) {
  Dataset ds({1.0, 2.0, 3.0, 4.0}, 1, {1, -1, 1, -1});
  const auto stumps = enumerate_stumps(ds);
  const auto m = build_matrix(ds, stumps);
  // Threshold 2.5: (1,0,0,1) and its flip (0,1,1,0); neither contains the other.
  bool found = false;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (m.representative(r) == Stump{0, 2.5, 1}) found = true;
  }
  EXPECT_TRUE(found);
}

TEST(BuildMatrix, PerfectStumpIsRefused) {
  Dataset ds({1.0, 2.0, 3.0, 4.0}, 1, {-1, -1, 1, 1});
  try {
    build_matrix(ds, enumerate_stumps(ds));
    FAIL() << "expected PerfectHypothesisError";
  } catch (const PerfectHypothesisError& e) {
    EXPECT_EQ(e.stump(), (Stump{0, 2.5, 1}));
  }
}

TEST(BuildMatrix, Rudin3ReducesToUnitRows) {
  const auto ds = make_rudin3();
  const auto m = build_matrix(ds, enumerate_stumps(ds));
  ASSERT_EQ(m.rows(), 3u);
  for (std::size_t r = 0; r < 3; ++r) {
    int ones = 0;
    for (auto b : m.row(r)) ones += b;
    EXPECT_EQ(ones, 1);
  }
  EXPECT_EQ(rows_of(m), (Rows{{1, 0, 0}, {0, 0, 1}, {0, 1, 0}}));
}

TEST(Equivalence, ZeroEpsKeepsEveryRow) {
  auto m = DichotomyMatrix::from_rows({{1, 0, 0}, {1, 0, 1}, {0, 1, 0}});
  const std::vector<double> w{0.2, 0.3, 0.5};
  const auto classes = equivalence_classes(m, w, 0.0);
  EXPECT_EQ(classes, (std::vector<std::size_t>{0, 1, 2}));
  const auto rep = merge_equivalent(m, w, 0.0);
  EXPECT_EQ(rep.merged, m);
  EXPECT_TRUE(rep.merged_classes.empty());
}

TEST(Equivalence, MergesRowsDifferingOnZeroMass) {
  auto m = DichotomyMatrix::from_rows({{1, 0, 0}, {1, 0, 1}});
  const std::vector<double> w{0.6, 0.4, 0.0};
  const auto rep = merge_equivalent(m, w, 1e-15);
  EXPECT_EQ(rows_of(rep.merged), (Rows{{1, 0, 0}}));
  EXPECT_EQ(rep.kept_rows, (std::vector<std::size_t>{0}));
  ASSERT_EQ(rep.merged_classes.size(), 1u);
  EXPECT_EQ(rep.merged_classes[0], (std::vector<std::size_t>{0, 1}));
}

TEST(Equivalence, TransitiveClosure) {
  // 0~1 and 1~2 through different tiny coordinates; 0 and 2 differ by 2e-16.
  auto m = DichotomyMatrix::from_rows({{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 1, 1, 0}, {0, 0, 0, 1}});
  const std::vector<double> w{0.5, 1e-16, 1e-16, 0.5 - 2e-16};
  const auto classes = equivalence_classes(m, w, 1.5e-16);
  EXPECT_EQ(classes, (std::vector<std::size_t>{0, 0, 0, 3}));
  EquivalenceIndex index(m, 1.5e-16);
  EXPECT_EQ(index.update(w), classes);
  EXPECT_EQ(index.merged_away(), 2u);
}

TEST(Equivalence, IndexMatchesPairwiseDefinition) {
  std::mt19937_64 gen(17);
  std::bernoulli_distribution bit(0.5);
  std::exponential_distribution<double> expo(1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 12;
    Rows rows(20, std::vector<std::uint8_t>(m));
    for (auto& r : rows) {
      for (auto& b : r) b = bit(gen);
    }
    std::vector<double> w(m);
    double s = 0.0;
    for (auto& v : w) {
      v = expo(gen);
      if (bit(gen)) v *= 1e-14;
      s += v;
    }
    for (auto& v : w) v /= s;
    const auto mat = DichotomyMatrix::from_rows(rows);
    const double eps = 1e-12;
    // Brute force closure over the pairwise relation.
    std::vector<std::size_t> cls(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) cls[r] = r;
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t a = 0; a < rows.size(); ++a) {
        for (std::size_t b = 0; b < rows.size(); ++b) {
          double diff = 0.0;
          for (std::size_t i = 0; i < m; ++i) {
            if (rows[a][i] != rows[b][i]) diff += w[i];
          }
          if (diff < eps && cls[a] != cls[b]) {
            const auto lo = std::min(cls[a], cls[b]);
            const auto hi = std::max(cls[a], cls[b]);
            for (auto& c : cls) {
              if (c == hi) c = lo;
            }
            changed = true;
          }
        }
      }
    }
    EquivalenceIndex index(mat, eps);
    EXPECT_EQ(index.update(w), cls) << "trial " << trial;
  }
}

TEST(Prune, DoesNotChangeTrajectories) {
  // Dominated rows never have the smallest error at interior weights, so
  // iterating on the deduplicated matrix and on the pruned one must agree.
  const auto ds = make_two_gaussians(40, 1.5, 9);
  const auto stumps = enumerate_stumps(ds);
  std::vector<std::uint8_t> bits;
  std::vector<Stump> reps;
  for (const auto& s : stumps) {
    const auto row = dichotomy_of(s, ds);
    bits.insert(bits.end(), row.begin(), row.end());
    reps.push_back(s);
  }
  const auto full = deduplicate(DichotomyMatrix(ds.size(), bits, reps));
  const auto pruned = build_matrix(ds, stumps);
  ASSERT_LT(pruned.rows(), full.rows());
  WeightVector a = WeightVector::uniform(ds.size());
  WeightVector b = a;
  for (int t = 0; t < 300; ++t) {
    auto sa = a_update(full, a);
    auto sb = a_update(pruned, b);
    ASSERT_TRUE(sa.halt.completed());
    ASSERT_TRUE(sb.halt.completed());
    EXPECT_EQ(full.representative(sa.record.selected_row),
              pruned.representative(sb.record.selected_row));
    a = std::move(sa.next);
    b = std::move(sb.next);
    ASSERT_EQ(a, b) << "round " << t;
  }
}

}  // namespace
}  // namespace optboost
