#ifndef DSGD_SVRG_HPP
#define DSGD_SVRG_HPP

#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>

#include "dsgd/approx.hpp"
#include "dsgd/linalg.hpp"

namespace dsgd {

enum class Sampling { with_replacement, shuffled_pass };

struct SvrgConfig {
  int epochs = 1;                    // s
  double step_size = -1.0;           // eta; negative = auto (0.1 / local Lipschitz bound)
  long long updates_per_epoch = -1;  // m; -1 = n_p, 0 = no inner updates
  std::uint64_t seed = 0;
  Sampling sampling = Sampling::with_replacement;

  void validate() const {
    if (epochs < 1) throw std::invalid_argument("epochs must be >= 1");
  }
};

class SolverDiverged : public std::runtime_error {
 public:
  explicit SolverDiverged(double iterate_norm)
      : std::runtime_error("svrg iterate diverged, |w| = " + std::to_string(iterate_norm)),
        iterate_norm_(iterate_norm) {}
  double iterate_norm() const { return iterate_norm_; }

 private:
  double iterate_norm_;
};

inline double auto_step_size(const Objective &obj, const DataView &view) {
  return 0.1 / lipschitz_bound(obj, view);
}

// Variance-reduced SGD on a TiltedApprox. Each of the s epochs takes a full
// gradient mu at the snapshot ws, then m corrected steps
//   w <- w - eta * ( n_p (grad psi_j(w) - grad psi_j(ws)) + mu )
//      = w - eta * ( n_p (l'(w.x_j) - l'(ws.x_j)) x_j + lambda (w - ws) + mu )
// (the tilt cancels in the component difference). The n_p factor makes the
// update direction an unbiased estimate of grad fhat_p(w) under uniform
// sampling. The snapshot is the last iterate of the previous epoch.
inline Vec run_svrg(const TiltedApprox &a, const Vec &v0, const SvrgConfig &cfg,
                    std::mt19937_64 &rng) {
  cfg.validate();
  if (v0.size() != a.anchor_w.size()) throw std::invalid_argument("dimension mismatch");
  const std::size_t n = a.n_local();
  const std::size_t m =
      cfg.updates_per_epoch < 0 ? n : static_cast<std::size_t>(cfg.updates_per_epoch);
  const double eta = cfg.step_size < 0.0 ? auto_step_size(a.obj, a.view) : cfg.step_size;

  std::vector<std::uint32_t> order;
  Vec w = v0;
  Vec snapshot = v0;
  std::vector<double> snapshot_slope(n);  // l' at snapshot margins
  Vec step(w.size());

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Vec mu = approx_gradient(a, snapshot);
    for (std::size_t j = 0; j < n; ++j) {
      const Example &ex = a.view.example(j);
      snapshot_slope[j] =
          loss_eval(a.obj.loss, ex.features.dot_dense(snapshot), ex.label).slope;
    }
    if (cfg.sampling == Sampling::shuffled_pass) {
      order.resize(n);
      std::iota(order.begin(), order.end(), 0u);
      std::shuffle(order.begin(), order.end(), rng);
    }
    for (std::size_t k = 0; k < m; ++k) {
      std::size_t j;
      if (cfg.sampling == Sampling::with_replacement) {
        j = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
      } else {
        j = order[k % n];
      }
      const Example &ex = a.view.example(j);
      const double slope = loss_eval(a.obj.loss, ex.features.dot_dense(w), ex.label).slope;
      for (std::size_t i = 0; i < w.size(); ++i)
        step[i] = a.obj.lambda * (w[i] - snapshot[i]) + mu[i];
      ex.features.add_scaled_to((slope - snapshot_slope[j]) * static_cast<double>(n), step);
      axpy(-eta, step, w);
    }
    if (!all_finite(w) || norm_inf(w) > 1e100) throw SolverDiverged(norm_inf(w));
    snapshot = w;
  }
  return w;
}

inline Vec run_svrg(const TiltedApprox &a, const Vec &v0, const SvrgConfig &cfg) {
  std::mt19937_64 rng(cfg.seed);
  return run_svrg(a, v0, cfg, rng);
}

// One epoch of plain SGD on the untilted local objective
//   ftilde_p(w) = lambda/2 ||w||^2 + L_p(w),
// used for parameter-mixing initialization. n_p steps of
//   w <- w - eta * (l'(w.x_j) x_j + lambda w / n_p).
inline Vec plain_sgd_epoch(const Objective &obj, const DataView &view, const Vec &w0,
                           double eta, Sampling sampling, std::mt19937_64 &rng) {
  const std::size_t n = view.size();
  Vec w = w0;
  std::vector<std::uint32_t> order;
  if (sampling == Sampling::shuffled_pass) {
    order.resize(n);
    std::iota(order.begin(), order.end(), 0u);
    std::shuffle(order.begin(), order.end(), rng);
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t j = sampling == Sampling::with_replacement
                        ? std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)
                        : order[k];
    const Example &ex = view.example(j);
    const double slope = loss_eval(obj.loss, ex.features.dot_dense(w), ex.label).slope;
    const double shrink = 1.0 - eta * obj.lambda * inv_n;
    scale(shrink, w);
    ex.features.add_scaled_to(-eta * slope, w);
  }
  if (!all_finite(w)) throw SolverDiverged(norm2(w));
  return w;
}

}  // namespace dsgd

#endif  // DSGD_SVRG_HPP
