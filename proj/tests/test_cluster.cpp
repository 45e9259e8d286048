#include <gtest/gtest.h>

#include <random>
#include <set>

#include "test_util.hpp"

using namespace dsgd;

namespace {

struct ClusterFixture {
  Dataset ds;
  PartitionPlan plan;
};

ClusterFixture make_fixture(std::mt19937_64 &rng, std::size_t n, int P) {
  ClusterFixture fx;
  fx.ds = testutil::random_instance(rng, n, 6);
  fx.plan = partition(fx.ds, P, PartitionStrategy::round_robin);
  return fx;
}

}  // namespace

TEST(Broadcast, AllNodesSeeIdenticalVector) {
  std::mt19937_64 rng(61);
  ClusterFixture fx = make_fixture(rng, 16, 4);
  Cluster cluster(fx.ds, fx.plan, 0, 4);
  Vec w = testutil::random_vec(rng, fx.ds.dim);
  const Vec &seen = cluster.broadcast(w, CommPhase::broadcast_w);
  EXPECT_EQ(seen, w);
  EXPECT_EQ(cluster.ledger().passes, 1u);
  cluster.broadcast(w, CommPhase::broadcast_w);
  EXPECT_EQ(cluster.ledger().passes, 2u);
  EXPECT_EQ(cluster.ledger().phase(CommPhase::broadcast_w), 2u);
}

TEST(Broadcast, DimMismatchRejected) {
  std::mt19937_64 rng(62);
  ClusterFixture fx = make_fixture(rng, 8, 2);
  Cluster cluster(fx.ds, fx.plan, 0, 1);
  Vec bad(fx.ds.dim + 1, 0.0);
  EXPECT_THROW(cluster.broadcast(bad, CommPhase::broadcast_w), std::invalid_argument);
}

TEST(ReduceSum, UnitVectorsPerNode) {
  std::mt19937_64 rng(63);
  const int P = 4;
  ClusterFixture fx = make_fixture(rng, 16, P);
  Cluster cluster(fx.ds, fx.plan, 0, 2);
  std::vector<Vec> contrib(P, Vec(fx.ds.dim, 0.0));
  for (int p = 0; p < P; ++p) contrib[p][p] = 1.0;
  Vec out = cluster.reduce_sum(contrib, CommPhase::reduce_g);
  for (int p = 0; p < P; ++p) EXPECT_EQ(out[p], 1.0);
  for (std::size_t j = P; j < fx.ds.dim; ++j) EXPECT_EQ(out[j], 0.0);
  EXPECT_EQ(cluster.ledger().passes, 1u);
  EXPECT_EQ(cluster.ledger().phase(CommPhase::reduce_g), 1u);
}

TEST(ReduceSum, GradientAdditivity) {
  std::mt19937_64 rng(64);
  const int P = 3;
  ClusterFixture fx = make_fixture(rng, 12, P);
  Objective obj{LossKind::logistic, 0.3};
  Vec w = testutil::random_vec(rng, fx.ds.dim);
  Cluster cluster(fx.ds, fx.plan, 0, 3);
  std::vector<Vec> grads(P);
  cluster.for_each_node([&](NodeContext &node) {
    grads[node.id] = local_loss_and_gradient(obj, node.view, w).grad;
  });
  Vec g = cluster.reduce_sum(grads, CommPhase::reduce_g);
  axpy(obj.lambda, w, g);
  Vec expect = objective_gradient(obj, fx.ds, w);
  for (std::size_t j = 0; j < g.size(); ++j)
    EXPECT_NEAR(g[j], expect[j], 1e-12 * (1.0 + std::fabs(expect[j])));
}

TEST(ReduceSum, DeterministicAcrossRepeats) {
  std::mt19937_64 rng(65);
  const int P = 5;
  ClusterFixture fx = make_fixture(rng, 20, P);
  std::vector<Vec> contrib(P);
  for (int p = 0; p < P; ++p) contrib[p] = testutil::random_vec(rng, fx.ds.dim);
  Cluster c1(fx.ds, fx.plan, 0, 1);
  Cluster c2(fx.ds, fx.plan, 0, 8);
  EXPECT_EQ(c1.reduce_sum(contrib, CommPhase::reduce_g),
            c2.reduce_sum(contrib, CommPhase::reduce_g));
}

TEST(ReduceScalars, CountsMessagesNotPasses) {
  std::mt19937_64 rng(66);
  const int P = 3;
  ClusterFixture fx = make_fixture(rng, 9, P);
  Cluster cluster(fx.ds, fx.plan, 0, 1);
  std::vector<std::vector<double>> tuples(P, {1.0, 2.0});
  for (int trial = 0; trial < 5; ++trial) cluster.reduce_scalars(tuples);
  EXPECT_EQ(cluster.ledger().scalar_msgs, 5u);
  EXPECT_EQ(cluster.ledger().passes, 0u);
}

TEST(ReduceScalars, ComponentwiseSums) {
  std::mt19937_64 rng(67);
  ClusterFixture fx = make_fixture(rng, 4, 2);
  Cluster cluster(fx.ds, fx.plan, 0, 1);
  std::vector<double> out = cluster.reduce_scalars({{1.0, -2.0}, {0.5, 4.0}});
  EXPECT_EQ(out, (std::vector<double>{1.5, 2.0}));
  // P = 1 reduce is the identity
  ClusterFixture fx1 = make_fixture(rng, 4, 1);
  Cluster single(fx1.ds, fx1.plan, 0, 1);
  EXPECT_EQ(single.reduce_scalars({{3.0, 7.0}}), (std::vector<double>{3.0, 7.0}));
}

TEST(NodeIsolation, ViewsPartitionTheIndexSet) {
  std::mt19937_64 rng(68);
  const int P = 4;
  ClusterFixture fx = make_fixture(rng, 18, P);
  Cluster cluster(fx.ds, fx.plan, 0, 4);
  std::vector<char> touched(fx.ds.size(), 0);
  for (int p = 0; p < P; ++p) {
    for (std::uint32_t i : *cluster.node(p).view.idx) {
      EXPECT_EQ(fx.plan.assignment[i], p);
      EXPECT_EQ(touched[i], 0);
      touched[i] = 1;
    }
  }
  for (char c : touched) EXPECT_EQ(c, 1);
}

TEST(NodeRng, SeedsMixNodeId) {
  std::mt19937_64 rng(69);
  ClusterFixture fx = make_fixture(rng, 8, 4);
  Cluster cluster(fx.ds, fx.plan, 123, 1);
  std::set<std::uint64_t> seeds;
  for (int p = 0; p < 4; ++p) seeds.insert(cluster.node(p).rng_seed);
  EXPECT_EQ(seeds.size(), 4u);
  EXPECT_EQ(cluster.node(0).rng_seed, 123u);  // seed xor node-id
}
