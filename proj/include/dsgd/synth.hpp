#ifndef DSGD_SYNTH_HPP
#define DSGD_SYNTH_HPP

#include <random>

#include "dsgd/data.hpp"

namespace dsgd {

// Deterministic linearly separable sparse instance: labels come from a hidden
// dense weight vector. Column scales follow a power law, giving the data
// matrix the dominant-direction-plus-long-tail spectrum typical of text
// corpora, and only examples close to the hidden hyperplane are kept, so the
// regularized optimum leaves most examples active. The bundled experiment
// fixture is the default configuration (n=2000, dim=200, 5% density, seed 42).
inline Dataset make_synthetic(std::size_t n = 2000, std::size_t dim = 200,
                              double density = 0.05, std::uint64_t seed = 42) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vec w_true(dim), col_scale(dim);
  for (double &v : w_true) v = gauss(rng);
  // A few dense "common term" columns dominate the spectrum; the sparse tail
  // columns decay with a mild power law. The absolute scale places the
  // per-coordinate data curvature between ~λ·2e0 and ~λ·5e2 for the default
  // configuration, giving a wide but bounded spectrum with near-uniform row
  // norms.
  const std::size_t head = std::min<std::size_t>(3, dim);
  for (std::size_t j = 0; j < head; ++j)
    col_scale[j] = 0.0113 * std::pow(0.8, static_cast<double>(j));
  for (std::size_t j = head; j < dim; ++j)
    col_scale[j] = 0.0159 * std::pow(static_cast<double>(j + 1 - head), -0.32);
  // overall nnz density ~ the requested density including the dense head
  const double tail_density =
      dim > head ? std::max(0.0, (density * dim - static_cast<double>(head))) /
                       static_cast<double>(dim - head)
                 : 0.0;

  Dataset ds;
  ds.dim = dim;
  ds.examples.reserve(n);
  while (ds.examples.size() < n) {
    Example ex;
    double scale_sq = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
      if (j < head || unif(rng) < tail_density) {
        ex.features.indices.push_back(static_cast<std::uint32_t>(j));
        ex.features.values.push_back(gauss(rng) * col_scale[j]);
        scale_sq += col_scale[j] * col_scale[j];
      }
    }
    if (ex.features.indices.empty()) continue;
    // Keep only examples whose functional margin against the hidden
    // hyperplane is small but nonzero: strictly separable, tiny geometric
    // margin.
    const double margin = ex.features.dot_dense(w_true);
    const double typical = std::sqrt(scale_sq);
    if (std::fabs(margin) < 0.01 * typical || std::fabs(margin) > 0.05 * typical) continue;
    ex.label = margin > 0 ? 1 : -1;
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

// Hand-sized fixture used throughout the unit tests: 6 examples in dim 4.
inline Dataset make_tiny6() {
  Dataset ds;
  ds.dim = 4;
  auto add = [&](std::vector<std::uint32_t> idx, std::vector<double> val, int y) {
    ds.examples.push_back(Example{SparseVector{std::move(idx), std::move(val)}, y});
  };
  add({0, 1}, {1.0, 0.5}, 1);
  add({1, 2}, {-1.0, 0.25}, -1);
  add({0, 3}, {0.75, -1.5}, 1);
  add({2}, {2.0}, -1);
  add({0, 2, 3}, {-0.5, 1.0, 0.5}, -1);
  add({1, 3}, {1.5, 1.0}, 1);
  return ds;
}

}  // namespace dsgd

#endif  // DSGD_SYNTH_HPP
