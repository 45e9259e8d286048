#ifndef DSGD_LOSS_HPP
#define DSGD_LOSS_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include "dsgd/data.hpp"
#include "dsgd/linalg.hpp"

namespace dsgd {

enum class LossKind { logistic, squared_hinge, least_squares };

inline LossKind loss_kind_from_string(const std::string &s) {
  if (s == "logistic") return LossKind::logistic;
  if (s == "squared-hinge" || s == "squared_hinge") return LossKind::squared_hinge;
  if (s == "least-squares" || s == "least_squares") return LossKind::least_squares;
  throw std::invalid_argument("unknown loss '" + s + "'");
}

inline const char *to_string(LossKind k) {
  switch (k) {
    case LossKind::logistic: return "logistic";
    case LossKind::squared_hinge: return "squared-hinge";
    case LossKind::least_squares: return "least-squares";
  }
  return "?";
}

struct LossEval {
  double value;  // l(margin, y), >= 0
  double slope;  // d l / d margin
};

inline LossEval loss_eval(LossKind kind, double margin, int y) {
  switch (kind) {
    case LossKind::logistic: {
      const double ym = y * margin;
      // branch keeps exp() argument non-positive
      if (ym >= 0) {
        const double e = std::exp(-ym);
        return {std::log1p(e), -y * e / (1.0 + e)};
      }
      const double e = std::exp(ym);
      return {-ym + std::log1p(e), -y / (1.0 + e)};
    }
    case LossKind::squared_hinge: {
      const double h = 1.0 - y * margin;
      if (h <= 0.0) return {0.0, 0.0};
      return {h * h, -2.0 * y * h};
    }
    case LossKind::least_squares: {
      const double r = margin - y;
      return {0.5 * r * r, r};
    }
  }
  throw std::logic_error("unreachable loss kind");
}

// curvature bound of l'' w.r.t. the margin
inline double loss_curvature_bound(LossKind kind) {
  switch (kind) {
    case LossKind::logistic: return 0.25;
    case LossKind::squared_hinge: return 2.0;
    case LossKind::least_squares: return 1.0;
  }
  throw std::logic_error("unreachable loss kind");
}

struct Objective {
  LossKind loss = LossKind::logistic;
  double lambda = 1.0;  // > 0

  void validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  }
};

// Per-example margins z_i = w.x_i and, optionally, s_i = d.x_i for a
// direction d. Stamps identify which (w, d) versions the arrays belong to.
struct MarginCache {
  std::vector<double> z;
  std::vector<double> s;
  std::uint64_t z_stamp = 0;
  std::uint64_t s_stamp = 0;
};

inline std::vector<double> compute_margins(const DataView &view, const Vec &w) {
  if (w.size() != view.dim()) throw std::invalid_argument("dimension mismatch");
  std::vector<double> z(view.size());
  for (std::size_t j = 0; j < view.size(); ++j) z[j] = view.example(j).features.dot_dense(w);
  return z;
}

// f(w) = lambda/2 ||w||^2 + sum_i l(w.x_i, y_i). Margins reused when given.
inline double objective_value(const Objective &obj, const Dataset &ds, const Vec &w,
                              const std::vector<double> *margins = nullptr) {
  if (w.size() != ds.dim) throw std::invalid_argument("dimension mismatch");
  double loss_sum = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const double z = margins ? (*margins)[i] : ds.examples[i].features.dot_dense(w);
    loss_sum += loss_eval(obj.loss, z, ds.examples[i].label).value;
  }
  return 0.5 * obj.lambda * norm2_sq(w) + loss_sum;
}

inline Vec objective_gradient(const Objective &obj, const Dataset &ds, const Vec &w) {
  if (w.size() != ds.dim) throw std::invalid_argument("dimension mismatch");
  Vec g(w.size(), 0.0);
  for (const Example &ex : ds.examples) {
    const double z = ex.features.dot_dense(w);
    ex.features.add_scaled_to(loss_eval(obj.loss, z, ex.label).slope, g);
  }
  axpy(obj.lambda, w, g);
  return g;
}

struct LocalLossGrad {
  double value = 0.0;  // L_p(w), pure loss (no lambda term)
  Vec grad;            // grad L_p(w)
};

inline LocalLossGrad local_loss_and_gradient(const Objective &obj, const DataView &view,
                                             const Vec &w) {
  if (w.size() != view.dim()) throw std::invalid_argument("dimension mismatch");
  LocalLossGrad out;
  out.grad.assign(w.size(), 0.0);
  for (std::size_t j = 0; j < view.size(); ++j) {
    const Example &ex = view.example(j);
    const LossEval le = loss_eval(obj.loss, ex.features.dot_dense(w), ex.label);
    out.value += le.value;
    ex.features.add_scaled_to(le.slope, out.grad);
  }
  return out;
}

// Upper bound on the Lipschitz constant of grad f over the given examples:
// lambda + c * sum_i ||x_i||^2 with c the loss curvature bound.
inline double lipschitz_bound(const Objective &obj, const DataView &view) {
  double sq = 0.0;
  for (std::size_t j = 0; j < view.size(); ++j) sq += view.example(j).features.norm2_sq();
  return obj.lambda + loss_curvature_bound(obj.loss) * sq;
}

inline double lipschitz_bound(const Objective &obj, const Dataset &ds) {
  return lipschitz_bound(obj, whole_view(ds));
}

}  // namespace dsgd

#endif  // DSGD_LOSS_HPP
