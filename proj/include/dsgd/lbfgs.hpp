#ifndef DSGD_LBFGS_HPP
#define DSGD_LBFGS_HPP

#include <deque>

#include "dsgd/linalg.hpp"

namespace dsgd {

// Limited-memory BFGS direction via the two-loop recursion. Pairs with
// non-positive curvature s.y are dropped on insert. With an empty memory the
// direction is steepest descent.
class LbfgsMemory {
 public:
  explicit LbfgsMemory(std::size_t capacity = 10) : capacity_(capacity) {}

  void push(const Vec &s, const Vec &y) {
    const double sy = dot(s, y);
    if (sy <= 0.0) return;  // curvature condition failed; skip the pair
    pairs_.push_back({s, y, 1.0 / sy});
    if (pairs_.size() > capacity_) pairs_.pop_front();
  }

  void clear() { pairs_.clear(); }
  std::size_t size() const { return pairs_.size(); }

  Vec direction(const Vec &g) const {
    Vec q = g;
    if (pairs_.empty()) {
      scale(-1.0, q);
      return q;
    }
    std::vector<double> alpha(pairs_.size());
    for (std::size_t k = pairs_.size(); k-- > 0;) {
      const Pair &p = pairs_[k];
      alpha[k] = p.rho * dot(p.s, q);
      axpy(-alpha[k], p.y, q);
    }
    const Pair &last = pairs_.back();
    const double gamma = 1.0 / (last.rho * norm2_sq(last.y));
    scale(gamma, q);
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      const Pair &p = pairs_[k];
      const double beta = p.rho * dot(p.y, q);
      axpy(alpha[k] - beta, p.s, q);
    }
    scale(-1.0, q);
    return q;
  }

 private:
  struct Pair {
    Vec s, y;
    double rho;
  };
  std::size_t capacity_;
  std::deque<Pair> pairs_;
};

}  // namespace dsgd

#endif  // DSGD_LBFGS_HPP
