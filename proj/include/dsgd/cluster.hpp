#ifndef DSGD_CLUSTER_HPP
#define DSGD_CLUSTER_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <vector>

#include "dsgd/data.hpp"
#include "dsgd/linalg.hpp"

namespace dsgd {

// Communication-pass accounting: a "pass" is one feature-dimension-sized
// vector transferred between nodes. Scalar exchanges are tracked separately
// and never count as passes.
enum class CommPhase : int { broadcast_w = 0, reduce_g, reduce_d, line_search, init_mix };

struct CommLedger {
  std::uint64_t passes = 0;
  std::uint64_t scalar_msgs = 0;
  std::array<std::uint64_t, 5> phase_passes{};

  void add_pass(CommPhase phase) {
    ++passes;
    ++phase_passes[static_cast<int>(phase)];
  }
  void add_scalar_msg() { ++scalar_msgs; }
  std::uint64_t phase(CommPhase p) const { return phase_passes[static_cast<int>(p)]; }
};

struct NodeContext {
  int id = 0;
  DataView view;
  std::uint64_t rng_seed = 0;
  std::vector<double> z;  // margins of this node's examples at the current w
};

// In-process master/slave cluster. Logical nodes are scheduled on a worker
// pool; reductions always run in node-id order so results are independent of
// the pool size.
class Cluster {
 public:
  Cluster(const Dataset &data, const PartitionPlan &plan, std::uint64_t seed,
          unsigned threads = 0)
      : dim_(data.dim), threads_(threads ? threads : std::thread::hardware_concurrency()) {
    if (threads_ == 0) threads_ = 1;
    nodes_.reserve(plan.P);
    for (int p = 0; p < plan.P; ++p)
      nodes_.push_back(NodeContext{p, node_view(data, plan, p), seed ^ static_cast<std::uint64_t>(p), {}});
  }

  int node_count() const { return static_cast<int>(nodes_.size()); }
  NodeContext &node(int p) { return nodes_.at(p); }
  const NodeContext &node(int p) const { return nodes_.at(p); }
  CommLedger &ledger() { return ledger_; }
  const CommLedger &ledger() const { return ledger_; }

  // Run fn(node) for every node on the worker pool; fn must only touch its
  // own node's state.
  template <typename Fn>
  void for_each_node(Fn &&fn) {
    const int P = node_count();
    const unsigned workers = std::min<unsigned>(threads_, static_cast<unsigned>(P));
    if (workers <= 1) {
      for (int p = 0; p < P; ++p) fn(nodes_[p]);
      return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int p = static_cast<int>(w); p < P; p += static_cast<int>(workers)) fn(nodes_[p]);
      });
    }
    for (auto &th : pool) th.join();
  }

  // Master -> all nodes. All nodes observe the same vector; counted as one pass.
  const Vec &broadcast(const Vec &v, CommPhase phase) {
    if (v.size() != dim_) throw std::invalid_argument("broadcast dim mismatch");
    ledger_.add_pass(phase);
    shared_ = v;
    return shared_;
  }

  // Node-id-order sum of per-node vectors; one pass.
  Vec reduce_sum(const std::vector<Vec> &per_node, CommPhase phase) {
    if (per_node.size() != nodes_.size())
      throw std::invalid_argument("reduce expects one vector per node");
    for (const Vec &v : per_node) check_same_dim(v, per_node.front());
    ledger_.add_pass(phase);
    Vec out(per_node.front().size(), 0.0);
    for (const Vec &v : per_node) axpy(1.0, v, out);
    return out;
  }

  // Componentwise sum of small scalar tuples; not a pass.
  std::vector<double> reduce_scalars(const std::vector<std::vector<double>> &per_node) {
    if (per_node.size() != nodes_.size())
      throw std::invalid_argument("reduce expects one tuple per node");
    ledger_.add_scalar_msg();
    std::vector<double> out(per_node.front().size(), 0.0);
    for (const auto &tup : per_node) {
      if (tup.size() != out.size()) throw std::invalid_argument("scalar tuple size mismatch");
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += tup[i];
    }
    return out;
  }

 private:
  std::size_t dim_;
  unsigned threads_;
  std::vector<NodeContext> nodes_;
  CommLedger ledger_;
  Vec shared_;
};

}  // namespace dsgd

#endif  // DSGD_CLUSTER_HPP
