#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "optboost/diagnostics.hpp"
#include "optboost/dynamics.hpp"
#include "optboost/stumps.hpp"
#include "optboost/synth.hpp"
#include "oracles/textbook_adaboost.hpp"

namespace optboost {
namespace {

const double kHalfLn3 = 0.5 * std::log(3.0);

DichotomyMatrix two_rows() { return DichotomyMatrix::from_rows({{1, 0}, {0, 1}}); }

TEST(Err, DotProduct) {
  const std::vector<double> w{0.2, 0.3, 0.5};
  EXPECT_DOUBLE_EQ(err(std::vector<std::uint8_t>{1, 0, 1}, w), 0.7);
  EXPECT_EQ(err(std::vector<std::uint8_t>{0, 0, 0}, w), 0.0);
  EXPECT_NEAR(err(std::vector<std::uint8_t>{1, 1, 1}, w), 1.0, 1e-15);
}

TEST(AdaSelect, ArgminAndTies) {
  const auto m = two_rows();
  auto sel = ada_select(m, std::vector<double>{0.3, 0.7});
  EXPECT_EQ(sel.row, 0u);
  EXPECT_EQ(sel.ties, (std::vector<std::size_t>{0}));
  sel = ada_select(m, std::vector<double>{0.5, 0.5});
  EXPECT_EQ(sel.row, 0u);
  EXPECT_EQ(sel.ties, (std::vector<std::size_t>{0, 1}));
  sel = ada_select(m, std::vector<double>{0.7, 0.3});
  EXPECT_EQ(sel.row, 1u);
}

TEST(AdaSelect, ErrorsEqualAfterRoundingTieByIndex) {
  // Below half an ulp of 0.30, so the sum rounds back to 0.30.
  const double a = 0.30;
  const double b = 0.30 + 2e-17;
  ASSERT_EQ(a, b);
  const std::vector<double> errors{b, a, 0.5};
  const auto sel = ada_select_from_errors(errors, 0.0);
  EXPECT_EQ(sel.row, 0u);
  EXPECT_EQ(sel.ties.size(), 2u);
  // 1e-16 is more than half an ulp there and stays distinguishable.
  const std::vector<double> apart{0.30 + 1e-16, 0.30};
  EXPECT_EQ(ada_select_from_errors(apart, 0.0).row, 1u);
}

TEST(AdaSelect, TieToleranceWidensTieSet) {
  const std::vector<double> errors{0.31, 0.30, 0.305};
  EXPECT_EQ(ada_select_from_errors(errors, 0.0).row, 1u);
  const auto sel = ada_select_from_errors(errors, 0.02);
  EXPECT_EQ(sel.row, 0u);
  EXPECT_EQ(sel.ties.size(), 3u);
}

TEST(TUpdate, Examples) {
  auto w = t_update(std::vector<std::uint8_t>{1, 0}, WeightVector({0.25, 0.75}));
  EXPECT_NEAR(w[0], 0.5, 1e-15);
  EXPECT_NEAR(w[1], 0.5, 1e-15);
  w = t_update(std::vector<std::uint8_t>{1, 0}, WeightVector({0.5, 0.5}));
  EXPECT_EQ(w, WeightVector({0.5, 0.5}));
  w = t_update(std::vector<std::uint8_t>{1, 0, 0}, WeightVector({0.2, 0.4, 0.4}));
  EXPECT_NEAR(w[0], 0.5, 1e-15);
  EXPECT_NEAR(w[1], 0.25, 1e-15);
  EXPECT_NEAR(w[2], 0.25, 1e-15);
}

TEST(TUpdate, DomainErrors) {
  EXPECT_THROW(t_update(std::vector<std::uint8_t>{0, 0}, WeightVector({0.5, 0.5})),
               DomainError);
  EXPECT_THROW(t_update(std::vector<std::uint8_t>{1, 1}, WeightVector({0.5, 0.5})),
               DomainError);
}

TEST(Alpha, Values) {
  EXPECT_NEAR(alpha(0.25), 0.5493061443340549, 1e-15);
  EXPECT_GT(alpha(0.5 - 1e-12), 0.0);
  EXPECT_LT(alpha(0.5 - 1e-12), 1e-11);
  EXPECT_THROW(alpha(0.0), DomainError);
  EXPECT_THROW(alpha(0.5), DomainError);
  EXPECT_THROW(alpha(-0.1), DomainError);
}

TEST(AUpdate, ComposesSelectUpdateAlpha) {
  const auto step = a_update(two_rows(), WeightVector({0.25, 0.75}));
  ASSERT_TRUE(step.halt.completed());
  EXPECT_EQ(step.record.selected_row, 0u);
  EXPECT_DOUBLE_EQ(step.record.eps, 0.25);
  EXPECT_NEAR(step.record.alpha, kHalfLn3, 1e-15);
  EXPECT_NEAR(step.next[0], 0.5, 1e-15);
  EXPECT_NEAR(step.next[1], 0.5, 1e-15);
}

TEST(AUpdate, Halts) {
  const auto m = two_rows();
  auto step = a_update(m, WeightVector({1.0, 0.0}));
  EXPECT_EQ(step.halt.kind, HaltReason::Kind::kZeroError);
  EXPECT_EQ(step.halt.row, 1u);
  EXPECT_EQ(step.next.size(), 0u);
  step = a_update(m, WeightVector({0.5, 0.5}));
  EXPECT_EQ(step.halt.kind, HaltReason::Kind::kNoWeakLearning);
  step = a_update(m, WeightVector({std::numeric_limits<double>::quiet_NaN(), 0.5}));
  EXPECT_EQ(step.halt.kind, HaltReason::Kind::kNumericFailure);
  EXPECT_EQ(to_string(HaltReason::Kind::kZeroError), "zero_error");
  EXPECT_EQ(to_string(HaltReason::Kind::kNoWeakLearning), "no_weak_learning");
}

TEST(InitWeight, UniformAndRandom) {
  EXPECT_EQ(init_weight(UniformInit{}, 4), WeightVector({0.25, 0.25, 0.25, 0.25}));
  const auto a = init_weight(RandomSimplexInit{5}, 7);
  EXPECT_EQ(a, init_weight(RandomSimplexInit{5}, 7));
  EXPECT_NE(a, init_weight(RandomSimplexInit{6}, 7));
  EXPECT_TRUE(a.on_simplex());
}

TEST(InitWeight, FlatDirichletMean) {
  std::vector<double> mean(3, 0.0);
  const int draws = 10000;
  for (int k = 0; k < draws; ++k) {
    const auto w = init_weight(RandomSimplexInit{static_cast<std::uint64_t>(k)}, 3);
    for (std::size_t i = 0; i < 3; ++i) mean[i] += w[i] / draws;
  }
  for (double v : mean) EXPECT_NEAR(v, 1.0 / 3.0, 0.01);
}

TEST(SnapshotSchedule, DenseThenLogSpaced) {
  SnapshotSchedule s{10, 5};
  const auto r = s.rounds_up_to(1000);
  for (std::size_t t = 1; t <= 10; ++t) EXPECT_EQ(r[t - 1], t);
  EXPECT_EQ(r.back(), 1000u);
  EXPECT_TRUE(std::is_sorted(r.begin(), r.end()));
  EXPECT_LT(r.size(), 30u);
}

TEST(Run, SingleRound) {
  RunOptions opts;
  opts.rounds = 1;
  const auto res = run(two_rows(), WeightVector({0.25, 0.75}), opts);
  EXPECT_TRUE(res.halt.completed());
  ASSERT_EQ(res.trajectory.rounds.size(), 1u);
  EXPECT_EQ(res.trajectory.rounds[0].t, 1u);
  EXPECT_DOUBLE_EQ(res.trajectory.rounds[0].eps, 0.25);
  EXPECT_NEAR(res.trajectory.rounds[0].alpha, kHalfLn3, 1e-15);
  EXPECT_NEAR(res.trajectory.final_weight[0], 0.5, 1e-15);
  EXPECT_NEAR(res.trajectory.final_weight[1], 0.5, 1e-15);
}

TEST(Run, HaltKeepsCompletedRounds) {
  RunOptions opts;
  opts.rounds = 5;
  const auto res = run(two_rows(), WeightVector({0.25, 0.75}), opts);
  EXPECT_EQ(res.halt.kind, HaltReason::Kind::kNoWeakLearning);
  EXPECT_EQ(res.halt.t, 2u);
  EXPECT_EQ(res.trajectory.rounds.size(), 1u);
}

TEST(Run, ReplayIsBitIdentical) {
  const auto ds = make_two_gaussians(60, 1.0, 2);
  const auto m = build_matrix(ds, enumerate_stumps(ds));
  RunOptions opts;
  opts.rounds = 500;
  opts.equivalence_eps = 1e-15;
  opts.checkpoints = {100, 250, 500};
  opts.tail_length = 50;
  const auto w1 = init_weight(RandomSimplexInit{4}, ds.size());
  const auto a = run(m, w1, opts);
  const auto b = run(m, w1, opts);
  EXPECT_EQ(a.trajectory, b.trajectory);
  EXPECT_EQ(a.trajectory.checkpoints.size(), 3u);
  EXPECT_EQ(a.trajectory.tail.size(), 50u);
  EXPECT_EQ(a.trajectory.tail.back().t, 500u);
}

TEST(Run, MatchesTextbookOracleOnSmallInstance) {
  Dataset ds({0.1, 1.0,
              0.4, 0.2,
              0.7, 0.9,
              0.9, 0.5},
             2, {1, -1, -1, 1});
  const auto m = build_matrix(ds, enumerate_stumps(ds));
  oracle::TextbookAdaBoost ref(std::vector<double>(ds.features().begin(), ds.features().end()),
                               2, std::vector<int>(ds.labels().begin(), ds.labels().end()));
  WeightVector w = WeightVector::uniform(4);
  for (int t = 0; t < 10; ++t) {
    auto step = a_update(m, w);
    ASSERT_TRUE(step.halt.completed());
    ASSERT_TRUE(ref.round());
    EXPECT_NEAR(step.record.alpha, ref.last_alpha(), 1e-12);
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_NEAR(step.next[i], ref.weights()[i], 1e-12) << "round " << t << " i " << i;
    }
    w = std::move(step.next);
  }
}

class RunProperties : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(RunProperties, SimplexHalfErrorAndExponentialIdentity) {
  const auto ds = make_two_gaussians(50, 1.0, GetParam());
  const auto m = build_matrix(ds, enumerate_stumps(ds));
  RunOptions opts;
  opts.rounds = 300;
  std::size_t checked = 0;
  opts.hook = [&](const RoundView& v) {
    ++checked;
    EXPECT_TRUE(v.after.on_simplex(1e-12));
    EXPECT_NEAR(err(m.row(v.record.selected_row), v.after.values()), 0.5, 1e-12);
  };
  const auto res = run(m, WeightVector::uniform(ds.size()), opts);
  ASSERT_TRUE(res.halt.completed());
  EXPECT_EQ(checked, 300u);
  const auto& tr = res.trajectory;
  std::vector<double> c(ds.size());
  double mean = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    c[i] = std::log(tr.final_weight[i]) + tr.margin_numerator[i];
    mean += c[i] / static_cast<double>(c.size());
  }
  for (double v : c) EXPECT_NEAR(v, mean, 1e-8);
}

INSTANTIATE_TEST_SUITE_P(Seeds, RunProperties, ::testing::Values(1u, 2u, 3u));

TEST(Run, MinErrorAfterBurnInIsPositive) {
  const auto ds = make_xor_grid(6, 0.25, 1);
  const auto m = build_matrix(ds, enumerate_stumps(ds));
  RunOptions opts;
  opts.rounds = 2000;
  const auto res = run(m, WeightVector::uniform(ds.size()), opts);
  ASSERT_TRUE(res.halt.completed());
  EXPECT_EQ(res.trajectory.burn_in, m.rows() + 1);
  EXPECT_GT(res.trajectory.min_error_after_burn_in, 0.0);
  EXPECT_LE(res.trajectory.min_error_overall, res.trajectory.min_error_after_burn_in);
}

TEST(TieGapFromErrors, SecondOrderStatisticWithoutMerges) {
  const std::vector<double> errors{0.4, 0.3, 0.35, 0.3};
  const std::vector<std::size_t> cls{0, 1, 2, 3};
  EXPECT_DOUBLE_EQ(tie_gap_from_errors(errors, cls, 1), 0.0);
  const std::vector<std::size_t> merged{0, 1, 2, 1};
  EXPECT_DOUBLE_EQ(tie_gap_from_errors(errors, merged, 1), 0.35 - 0.3);
  const std::vector<std::size_t> all{0, 0, 0, 0};
  EXPECT_TRUE(std::isinf(tie_gap_from_errors(errors, all, 1)));
}

}  // namespace
}  // namespace optboost
