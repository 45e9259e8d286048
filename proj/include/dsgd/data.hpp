#ifndef DSGD_DATA_HPP
#define DSGD_DATA_HPP

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dsgd/linalg.hpp"

namespace dsgd {

struct SparseVector {
  std::vector<std::uint32_t> indices;  // strictly increasing, 0-based
  std::vector<double> values;

  // x . w for a dense w
  double dot_dense(const Vec &w) const {
    double s = 0.0;
    for (std::size_t k = 0; k < indices.size(); ++k) s += values[k] * w[indices[k]];
    return s;
  }

  double norm2_sq() const {
    double s = 0.0;
    for (double v : values) s += v * v;
    return s;
  }

  // w += c * x
  void add_scaled_to(double c, Vec &w) const {
    for (std::size_t k = 0; k < indices.size(); ++k) w[indices[k]] += c * values[k];
  }
};

struct Example {
  SparseVector features;
  int label = 1;  // +1 or -1
};

struct Dataset {
  std::vector<Example> examples;
  std::size_t dim = 0;

  std::size_t size() const { return examples.size(); }
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string &what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

namespace detail {

inline int map_label(double raw, std::size_t lineno) {
  if (raw == 1.0) return 1;
  if (raw == -1.0 || raw == 0.0) return -1;  // 0/1 files map 0 -> -1
  throw ParseError(lineno, "unsupported label value " + std::to_string(raw));
}

}  // namespace detail

// libsvm text format: `<label> <idx>:<val> ...`, indices 1-based.
// declared_dim, when nonzero, overrides max-index inference (must cover all
// indices seen).
inline Dataset parse_libsvm(std::istream &in, std::size_t declared_dim = 0) {
  Dataset ds;
  std::size_t max_index = 0;  // 1-based max seen
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // tolerate comments and blank lines
    std::size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream ls(line);
    double raw_label;
    if (!(ls >> raw_label)) throw ParseError(lineno, "cannot read label");
    Example ex;
    ex.label = detail::map_label(raw_label, lineno);
    std::string tok;
    std::uint64_t prev_index = 0;
    while (ls >> tok) {
      std::size_t colon = tok.find(':');
      if (colon == std::string::npos)
        throw ParseError(lineno, "expected idx:val, got '" + tok + "'");
      std::uint64_t idx;
      double val;
      try {
        std::size_t pos;
        idx = std::stoull(tok.substr(0, colon), &pos);
        if (pos != colon) throw std::invalid_argument(tok);
        val = std::stod(tok.substr(colon + 1), &pos);
        if (pos != tok.size() - colon - 1) throw std::invalid_argument(tok);
      } catch (const std::exception &) {
        throw ParseError(lineno, "malformed feature token '" + tok + "'");
      }
      if (idx < 1) throw ParseError(lineno, "feature indices are 1-based");
      if (idx <= prev_index) throw ParseError(lineno, "feature indices must be strictly increasing");
      prev_index = idx;
      max_index = std::max<std::uint64_t>(max_index, idx);
      ex.features.indices.push_back(static_cast<std::uint32_t>(idx - 1));
      ex.features.values.push_back(val);
    }
    ds.examples.push_back(std::move(ex));
  }
  if (ds.examples.empty()) throw ParseError(lineno, "no examples in input");
  ds.dim = max_index;
  if (declared_dim != 0) {
    if (declared_dim < max_index)
      throw std::invalid_argument("declared dim " + std::to_string(declared_dim) +
                                  " smaller than max feature index " + std::to_string(max_index));
    ds.dim = declared_dim;
  }
  return ds;
}

inline void serialize_libsvm(const Dataset &ds, std::ostream &out) {
  char buf[64];
  for (const Example &ex : ds.examples) {
    out << (ex.label > 0 ? "+1" : "-1");
    for (std::size_t k = 0; k < ex.features.indices.size(); ++k) {
      std::snprintf(buf, sizeof(buf), " %u:%.17g", ex.features.indices[k] + 1,
                    ex.features.values[k]);
      out << buf;
    }
    out << '\n';
  }
}

enum class PartitionStrategy { round_robin, contiguous, shuffled };

inline PartitionStrategy partition_strategy_from_string(const std::string &s) {
  if (s == "round-robin") return PartitionStrategy::round_robin;
  if (s == "contiguous") return PartitionStrategy::contiguous;
  if (s == "shuffled") return PartitionStrategy::shuffled;
  throw std::invalid_argument("unknown partition strategy '" + s + "'");
}

struct PartitionPlan {
  int P = 1;
  std::vector<int> assignment;                       // example index -> node id
  std::vector<std::vector<std::uint32_t>> node_idx;  // node id -> example indices
  PartitionStrategy strategy = PartitionStrategy::round_robin;
  std::uint64_t seed = 0;
};

inline PartitionPlan partition(const Dataset &ds, int P, PartitionStrategy strategy,
                               std::uint64_t seed = 0) {
  const std::size_t n = ds.size();
  if (P < 1) throw std::invalid_argument("node count must be >= 1");
  if (static_cast<std::size_t>(P) > n)
    throw std::invalid_argument("node count exceeds example count");
  PartitionPlan plan;
  plan.P = P;
  plan.strategy = strategy;
  plan.seed = seed;
  plan.assignment.resize(n);
  plan.node_idx.resize(P);

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  if (strategy == PartitionStrategy::shuffled) {
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
  }
  if (strategy == PartitionStrategy::round_robin) {
    for (std::size_t i = 0; i < n; ++i) plan.assignment[i] = static_cast<int>(i % P);
  } else {
    // ceil-split over `order`: first n%P nodes take one extra example
    const std::size_t base = n / P, rem = n % P;
    std::size_t pos = 0;
    for (int p = 0; p < P; ++p) {
      std::size_t cnt = base + (static_cast<std::size_t>(p) < rem ? 1 : 0);
      for (std::size_t k = 0; k < cnt; ++k) plan.assignment[order[pos++]] = p;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    plan.node_idx[plan.assignment[i]].push_back(static_cast<std::uint32_t>(i));
  return plan;
}

// Immutable view over one node's examples.
struct DataView {
  const Dataset *data = nullptr;
  const std::vector<std::uint32_t> *idx = nullptr;  // nullptr = whole dataset

  std::size_t size() const { return idx ? idx->size() : data->size(); }
  const Example &example(std::size_t j) const {
    return data->examples[idx ? (*idx)[j] : j];
  }
  std::size_t dim() const { return data->dim; }
};

inline DataView whole_view(const Dataset &ds) { return DataView{&ds, nullptr}; }

inline DataView node_view(const Dataset &ds, const PartitionPlan &plan, int p) {
  if (p < 0 || p >= plan.P) throw std::invalid_argument("invalid node id");
  return DataView{&ds, &plan.node_idx[p]};
}

}  // namespace dsgd

#endif  // DSGD_DATA_HPP
