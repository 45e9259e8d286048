#include <gtest/gtest.h>

#include <random>

#include "test_util.hpp"

using namespace dsgd;

namespace {

RunConfig base_config(Method m, int P, int epochs = 4) {
  RunConfig cfg;
  cfg.method = m;
  cfg.P = P;
  cfg.threads = 2;
  cfg.svrg.epochs = epochs;
  cfg.max_outer_iters = 20;
  cfg.grad_tol = 1e-10;
  return cfg;
}

bool traces_equal(const std::vector<IterationRecord> &a, const std::vector<IterationRecord> &b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].f != b[i].f || a[i].gnorm != b[i].gnorm || a[i].t != b[i].t ||
        a[i].passes != b[i].passes || a[i].safeguards != b[i].safeguards)
      return false;
  }
  return true;
}

}  // namespace

TEST(RunFs, SingleNodeManyEpochsMatchesBatchReference) {
  Dataset ds = make_tiny6();
  Objective obj{LossKind::least_squares, 0.1};
  PartitionPlan plan = partition(ds, 1, PartitionStrategy::round_robin);
  ReferenceSolution ref = solve_reference(obj, ds);
  RunConfig cfg = base_config(Method::FS, 1, 200);
  cfg.max_outer_iters = 60;
  RunResult res = run_fs(ds, plan, obj, cfg);
  Vec err = res.w;
  axpy(-1.0, ref.w_star, err);
  EXPECT_LE(norm2(err), 1e-4);
}

TEST(RunFs, ArmijoStepsDecreaseObjective) {
  Dataset ds = make_synthetic(200, 20, 0.2, 3);
  Objective obj{LossKind::least_squares, 0.01};
  PartitionPlan plan = partition(ds, 4, PartitionStrategy::round_robin);
  RunResult res = run_fs(ds, plan, obj, base_config(Method::FS, 4));
  ASSERT_GE(res.trace.size(), 2u);
  for (std::size_t i = 1; i < res.trace.size(); ++i)
    EXPECT_LE(res.trace[i].f, res.trace[i - 1].f);
}

TEST(RunFs, DeterministicTraceGivenSeed) {
  Dataset ds = make_synthetic(150, 15, 0.3, 5);
  Objective obj{LossKind::squared_hinge, 1e-3};
  PartitionPlan plan = partition(ds, 4, PartitionStrategy::round_robin);
  RunConfig cfg = base_config(Method::FS, 4);
  cfg.seed = 9;
  cfg.max_outer_iters = 8;
  RunResult a = run_fs(ds, plan, obj, cfg);
  RunResult b = run_fs(ds, plan, obj, cfg);
  EXPECT_TRUE(traces_equal(a.trace, b.trace));
  EXPECT_EQ(a.w, b.w);
}

TEST(RunFs, TraceIndependentOfWorkerPoolSize) {
  Dataset ds = make_synthetic(150, 15, 0.3, 6);
  Objective obj{LossKind::logistic, 1e-2};
  PartitionPlan plan = partition(ds, 6, PartitionStrategy::round_robin);
  RunConfig cfg = base_config(Method::FS, 6);
  cfg.max_outer_iters = 6;
  cfg.threads = 1;
  RunResult a = run_fs(ds, plan, obj, cfg);
  cfg.threads = 8;
  RunResult b = run_fs(ds, plan, obj, cfg);
  EXPECT_TRUE(traces_equal(a.trace, b.trace));
  EXPECT_EQ(a.w, b.w);
}

TEST(RunFs, PassDeltaIsThreePerIteration) {
  Dataset ds = make_synthetic(120, 12, 0.3, 7);
  Objective obj{LossKind::squared_hinge, 1e-3};
  PartitionPlan plan = partition(ds, 4, PartitionStrategy::round_robin);
  RunConfig cfg = base_config(Method::FS, 4);
  cfg.max_outer_iters = 6;
  RunResult res = run_fs(ds, plan, obj, cfg);
  ASSERT_GE(res.trace.size(), 3u);
  EXPECT_EQ(res.trace[0].passes, 2u);  // broadcast w, reduce g
  for (std::size_t i = 1; i < res.trace.size(); ++i)
    EXPECT_EQ(res.trace[i].passes - res.trace[i - 1].passes, 3u);
}

TEST(RunFs, ObserverSeesArmijoWolfeCompliantSteps) {
  Dataset ds = make_synthetic(100, 10, 0.4, 8);
  Objective obj{LossKind::logistic, 1e-2};
  PartitionPlan plan = partition(ds, 2, PartitionStrategy::round_robin);
  RunConfig cfg = base_config(Method::FS, 2);
  cfg.max_outer_iters = 10;
  int audited = 0;
  Observer obs = [&](const IterationAudit &a) {
    ++audited;
    EXPECT_LT(a.gd, 0.0);
    // full-vector re-verification of both line search conditions
    Vec wt = *a.w;
    axpy(a.t, *a.d, wt);
    const double f_next = objective_value(obj, ds, wt);
    EXPECT_NEAR(f_next, a.f_next, 1e-10 * (1.0 + std::fabs(f_next)));
    EXPECT_LE(f_next, a.f + cfg.linesearch.alpha * a.t * a.gd + 1e-10 * (1.0 + std::fabs(a.f)));
    const double slope_t = dot(objective_gradient(obj, ds, wt), *a.d);
    EXPECT_GE(slope_t, cfg.linesearch.beta * a.gd - 1e-10 * (1.0 + std::fabs(a.gd)));
    // gradient consistency of each node approximation at the anchor
    ASSERT_NE(a.approxes, nullptr);
    for (const TiltedApprox &ap : *a.approxes) {
      Vec diff = approx_gradient(ap, *a.w);
      axpy(-1.0, *a.g, diff);
      EXPECT_LE(norm2(diff), 1e-9 * (1.0 + norm2(*a.g)));
    }
  };
  run_fs(ds, plan, obj, cfg, nullptr, obs);
  EXPECT_GT(audited, 0);
}

TEST(RunSqm, GradientNormDrivenToTolerance) {
  std::mt19937_64 rng(81);
  Dataset ds = testutil::random_instance(rng, 40, 8);
  Objective obj{LossKind::least_squares, 0.2};
  PartitionPlan plan = partition(ds, 4, PartitionStrategy::round_robin);
  RunConfig cfg = base_config(Method::SQM, 4);
  cfg.grad_tol = 1e-8;
  cfg.max_outer_iters = 500;
  RunResult res = run_sqm(ds, plan, obj, cfg);
  EXPECT_EQ(res.stop_reason, "grad_tol");
  ASSERT_GE(res.trace.size(), 2u);
  EXPECT_LT(res.trace.back().gnorm, res.trace.front().gnorm);
}

TEST(RunSqm, PassDeltaIsTwoPerIteration) {
  Dataset ds = make_synthetic(100, 10, 0.3, 9);
  Objective obj{LossKind::squared_hinge, 1e-3};
  PartitionPlan plan = partition(ds, 4, PartitionStrategy::round_robin);
  RunConfig cfg = base_config(Method::SQM, 4);
  cfg.max_outer_iters = 8;
  RunResult res = run_sqm(ds, plan, obj, cfg);
  ASSERT_GE(res.trace.size(), 3u);
  EXPECT_EQ(res.trace[0].passes, 2u);
  for (std::size_t i = 1; i < res.trace.size(); ++i)
    EXPECT_EQ(res.trace[i].passes - res.trace[i - 1].passes, 2u);
}

TEST(RunSqm, PartitionInvariantTrace) {
  Dataset ds = make_synthetic(90, 9, 0.4, 10);
  Objective obj{LossKind::logistic, 1e-2};
  RunConfig cfg = base_config(Method::SQM, 1);
  cfg.max_outer_iters = 12;
  PartitionPlan p1 = partition(ds, 1, PartitionStrategy::round_robin);
  RunResult a = run_sqm(ds, p1, obj, cfg);
  cfg.P = 4;
  PartitionPlan p4 = partition(ds, 4, PartitionStrategy::round_robin);
  RunResult b = run_sqm(ds, p4, obj, cfg);
  // P = 1 and P = 4 are the same algorithm; only the summation grouping in
  // the reductions differs, so agreement is to rounding, not bit-exact.
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    EXPECT_NEAR(a.trace[i].f, b.trace[i].f, 1e-9 * (1.0 + std::fabs(a.trace[i].f)));
    EXPECT_NEAR(a.trace[i].t, b.trace[i].t, 1e-6 * (1.0 + std::fabs(a.trace[i].t)));
  }
  for (std::size_t j = 0; j < a.w.size(); ++j)
    EXPECT_NEAR(a.w[j], b.w[j], 1e-6 * (1.0 + std::fabs(a.w[j])));
}

TEST(RunHybrid, InitCostsOneExtraPass) {
  Dataset ds = make_synthetic(80, 8, 0.4, 11);
  Objective obj{LossKind::squared_hinge, 1e-2};
  PartitionPlan plan = partition(ds, 4, PartitionStrategy::round_robin);
  RunConfig cfg = base_config(Method::Hybrid, 4);
  cfg.max_outer_iters = 5;
  RunResult hy = run_hybrid(ds, plan, obj, cfg);
  RunConfig scfg = cfg;
  RunResult sq = run_sqm(ds, plan, obj, scfg);
  ASSERT_FALSE(hy.trace.empty());
  EXPECT_EQ(hy.trace[0].passes, sq.trace[0].passes + 1);
  EXPECT_EQ(hy.ledger.phase(CommPhase::init_mix), 1u);
}

TEST(RunHybrid, ZeroStepInitEqualsSqm) {
  Dataset ds = make_synthetic(80, 8, 0.4, 12);
  Objective obj{LossKind::logistic, 1e-2};
  PartitionPlan plan = partition(ds, 4, PartitionStrategy::round_robin);
  RunConfig cfg = base_config(Method::Hybrid, 4);
  cfg.svrg.step_size = 0.0;  // init SGD is the identity
  cfg.max_outer_iters = 8;
  RunResult hy = run_hybrid(ds, plan, obj, cfg);
  RunResult sq = run_sqm(ds, plan, obj, cfg);
  ASSERT_EQ(hy.trace.size(), sq.trace.size());
  for (std::size_t i = 0; i < hy.trace.size(); ++i) {
    EXPECT_EQ(hy.trace[i].f, sq.trace[i].f);
    EXPECT_EQ(hy.trace[i].t, sq.trace[i].t);
    EXPECT_EQ(hy.trace[i].passes, sq.trace[i].passes + 1);
  }
  EXPECT_EQ(hy.w, sq.w);
}

TEST(CheckStop, Rules) {
  RunConfig cfg;
  cfg.grad_tol = 1e-8;
  cfg.max_outer_iters = 10;
  EXPECT_TRUE(check_stop(0.0, 1.0, 0, cfg, nullptr).stop);  // g = 0 exactly
  EXPECT_FALSE(check_stop(1.0, 1.0, 0, cfg, nullptr).stop);
  EXPECT_TRUE(check_stop(1.0, 1.0, 10, cfg, nullptr).stop);

  ReferenceSolution ref;
  ref.f_star = 2.0;
  cfg.gap_tol = 1e-6;
  EXPECT_TRUE(check_stop(1.0, 2.0, 0, cfg, &ref).stop);  // f = f*
  EXPECT_FALSE(check_stop(1.0, 3.0, 0, cfg, &ref).stop);
  EXPECT_THROW(check_stop(1.0, 3.0, 0, cfg, nullptr), std::invalid_argument);
}

TEST(CheckStop, ZeroIterationBudgetGivesEmptyTrace) {
  Dataset ds = make_tiny6();
  Objective obj{LossKind::logistic, 0.1};
  PartitionPlan plan = partition(ds, 2, PartitionStrategy::round_robin);
  RunConfig cfg = base_config(Method::FS, 2);
  cfg.max_outer_iters = 0;
  RunResult res = run_fs(ds, plan, obj, cfg);
  EXPECT_TRUE(res.trace.empty());
  EXPECT_EQ(res.stop_reason, "max_outer_iters");
  EXPECT_EQ(res.ledger.passes, 0u);
}

TEST(Glrc, GapRatioBelowOneWithReference) {
  Dataset ds = make_synthetic(200, 20, 0.2, 13);
  Objective obj{LossKind::squared_hinge, 1e-3};
  ReferenceSolution ref = solve_reference(obj, ds);
  PartitionPlan plan = partition(ds, 4, PartitionStrategy::round_robin);
  RunConfig cfg = base_config(Method::FS, 4);
  cfg.max_outer_iters = 15;
  RunResult res = run_fs(ds, plan, obj, cfg, &ref);
  ASSERT_GE(res.trace.size(), 2u);
  for (std::size_t i = 1; i < res.trace.size(); ++i) {
    const double prev = res.trace[i - 1].f - ref.f_star;
    const double cur = res.trace[i].f - ref.f_star;
    if (prev > 1e-14) EXPECT_LT(cur / prev, 1.0);
    EXPECT_LE(res.trace[i].gap, res.trace[i - 1].gap);
  }
}
