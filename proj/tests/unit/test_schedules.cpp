// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "support/oracles.hpp"
#include "targetfill/lambda_schedule.hpp"
#include "targetfill/timestep_plan.hpp"

namespace targetfill {
namespace {

TEST(LambdaSchedule, PiecewiseKeyValues) {
    const auto l = LambdaSchedule::piecewise_linear(0.5, 200);
    EXPECT_EQ(l(200), 0.0);
    EXPECT_EQ(l(150), 0.5);
    EXPECT_EQ(l(100), 1.0);
    EXPECT_EQ(l(0), 1.0);
    EXPECT_DOUBLE_EQ(l(101), 99.0 / 100.0);
}

TEST(LambdaSchedule, PiecewiseShape) {
    for (int T : {7, 50, 100, 133}) {
        for (double p : {0.1, 0.25, 0.33, 0.5, 0.9}) {
            const auto l = LambdaSchedule::piecewise_linear(p, T);
            EXPECT_EQ(l(T), 0.0);
            EXPECT_EQ(l(0), 1.0);
            for (int t = 0; t <= T; ++t) {
                ASSERT_GE(l(t), 0.0);
                ASSERT_LE(l(t), 1.0);
                if (t <= p * T) ASSERT_EQ(l(t), 1.0) << t;
                if (t > 0) ASSERT_LE(l(t), l(t - 1));
                if (t > 0) ASSERT_LE(l(t - 1) - l(t), 1.0 / ((1.0 - p) * T) + 1e-12);
            }
        }
    }
}

TEST(LambdaSchedule, KneeAtOneIsConstantOne) {
    const auto l = LambdaSchedule::piecewise_linear(1.0, 10);
    for (int t = 0; t <= 10; ++t) EXPECT_EQ(l(t), 1.0);
}

TEST(LambdaSchedule, Constant) {
    const auto l = LambdaSchedule::constant(0.993);
    EXPECT_EQ(l(0), 0.993);
    EXPECT_EQ(l(77), 0.993);
}

TEST(LambdaSchedule, RejectsOutOfRange) {
    EXPECT_THROW(LambdaSchedule::constant(1.5), std::invalid_argument);
    EXPECT_THROW(LambdaSchedule::piecewise_linear(-0.1, 10), std::invalid_argument);
    EXPECT_THROW(LambdaSchedule::piecewise_linear(0.5, 0), std::invalid_argument);
}

TEST(JumpPlan, UnitJumpIsStrictDescent) {
    const auto plan = jump_plan(5, 1, 1);
    EXPECT_EQ(plan.start, 5);
    EXPECT_EQ(plan.visited(), (std::vector<int>{4, 3, 2, 1, 0}));
    EXPECT_EQ(plan.up_count(), 0u);
}

TEST(JumpPlan, HandEnumeratedExample) {
    const auto plan = jump_plan(4, 2, 2);
    EXPECT_EQ(plan.visited(), (std::vector<int>{3, 2, 3, 4, 3, 2, 1, 0}));
    EXPECT_EQ(plan.down_count(), 6u);
    EXPECT_EQ(plan.up_count(), 2u);
    EXPECT_EQ(denoiser_call_count(5, 1, 1), 5u);
    EXPECT_EQ(denoiser_call_count(4, 2, 2), 6u);
}

TEST(JumpPlan, StructureOnRandomParameters) {
    std::mt19937_64 gen(17);
    for (int i = 0; i < 300; ++i) {
        const int T = 1 + static_cast<int>(gen() % 120);
        const int j = 1 + static_cast<int>(gen() % 15);
        const int r = 1 + static_cast<int>(gen() % 6);
        const auto plan = jump_plan(T, j, r);
        ASSERT_EQ(plan.start, T);
        ASSERT_FALSE(plan.moves.empty());
        ASSERT_EQ(plan.moves.back().to, 0);
        int t = plan.start;
        for (std::size_t k = 0; k < plan.moves.size(); ++k) {
            const auto& mv = plan.moves[k];
            ASSERT_EQ(std::abs(mv.to - t), 1);
            ASSERT_EQ(mv.kind == Move::Kind::down, mv.to < t);
            ASSERT_LE(mv.to, T);
            ASSERT_GE(mv.to, 0);
            if (mv.kind == Move::Kind::up && (k == 0 || plan.moves[k - 1].kind == Move::Kind::down)) {
                ASSERT_EQ(t % j, 0);
                ASSERT_GT(t, 0);
            }
            t = mv.to;
        }
        ASSERT_EQ(plan.down_count(), testing::closed_form_call_count(T, j, r)) << T << " " << j << " " << r;
        ASSERT_EQ(denoiser_call_count(T, j, r), plan.down_count());
        if (r <= j) ASSERT_LE(plan.down_count(), static_cast<std::size_t>(T + (r - 1) * j * ((T - 1) / j)));
        const auto again = jump_plan(T, j, r);
        ASSERT_EQ(again.moves, plan.moves);
    }
}

TEST(JumpPlan, CallCountNonDecreasingInResample) {
    for (int T : {10, 37, 100})
        for (int j : {1, 3, 10})
            for (int r = 1; r < 8; ++r) EXPECT_LE(denoiser_call_count(T, j, r), denoiser_call_count(T, j, r + 1));
}

TEST(JumpPlan, RejectsNonPositiveParameters) {
    EXPECT_THROW(jump_plan(0, 1, 1), std::invalid_argument);
    EXPECT_THROW(jump_plan(4, 0, 1), std::invalid_argument);
    EXPECT_THROW(jump_plan(4, 1, 0), std::invalid_argument);
}

}  // namespace
}  // namespace targetfill
