#ifndef DSGD_METRICS_HPP
#define DSGD_METRICS_HPP

#include <algorithm>
#include <iostream>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "dsgd/linalg.hpp"

namespace dsgd {

struct ReferenceSolution {
  Vec w_star;
  double f_star = 0.0;
  double achieved_grad_norm = 0.0;  // inf-norm of grad f at w_star
};

inline double relative_gap(double f, const ReferenceSolution &ref, bool warn = true) {
  if (!(ref.f_star > 0.0)) throw std::invalid_argument("reference f* must be > 0");
  const double gap = (f - ref.f_star) / ref.f_star;
  if (gap < 0.0) {
    if (warn)
      std::cerr << "warning: objective " << f << " beats reference f* = " << ref.f_star
                << "; clamping gap to 0\n";
    return 0.0;
  }
  return gap;
}

// Area under the precision-recall curve by the average-precision summation
// sum_k dRecall_k * Precision_k, sweeping thresholds at distinct scores with
// tied scores entering as one group.
inline double auprc(const std::vector<double> &scores, const std::vector<int> &labels) {
  if (scores.size() != labels.size())
    throw std::invalid_argument("scores/labels size mismatch");
  const std::size_t n = scores.size();
  std::size_t total_pos = 0;
  for (int y : labels) total_pos += (y > 0);
  if (total_pos == 0) throw std::invalid_argument("auprc needs at least one positive label");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  double area = 0.0;
  std::size_t tp = 0, seen = 0;
  std::size_t k = 0;
  while (k < n) {
    std::size_t group_end = k + 1;
    while (group_end < n && scores[order[group_end]] == scores[order[k]]) ++group_end;
    std::size_t group_pos = 0;
    for (std::size_t j = k; j < group_end; ++j) group_pos += (labels[order[j]] > 0);
    const std::size_t tp_prev = tp;
    tp += group_pos;
    seen = group_end;
    const double precision = static_cast<double>(tp) / static_cast<double>(seen);
    const double d_recall =
        static_cast<double>(tp - tp_prev) / static_cast<double>(total_pos);
    area += d_recall * precision;
    k = group_end;
  }
  return area;
}

}  // namespace dsgd

#endif  // DSGD_METRICS_HPP
