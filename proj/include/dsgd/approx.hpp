#ifndef DSGD_APPROX_HPP
#define DSGD_APPROX_HPP

#include <utility>

#include "dsgd/data.hpp"
#include "dsgd/linalg.hpp"
#include "dsgd/loss.hpp"

namespace dsgd {

// Node-local model of the full objective, anchored at w_r with the tilt
// c = g_r - lambda*w_r - grad L_p(w_r) so that its gradient at the anchor
// equals the full gradient g_r:
//
//   fhat_p(w) = lambda/2 ||w||^2 + L_p(w) + c.(w - w_r)
struct TiltedApprox {
  int node = 0;
  Objective obj;
  DataView view;
  Vec anchor_w;              // w_r
  Vec anchor_g;              // g_r (full gradient at w_r)
  Vec local_grad_at_anchor;  // grad L_p(w_r)
  Vec tilt;                  // c

  std::size_t n_local() const { return view.size(); }
};

inline TiltedApprox build_approx(const Objective &obj, const DataView &view, int node,
                                 const Vec &anchor_w, const Vec &anchor_g) {
  if (anchor_w.size() != view.dim() || anchor_g.size() != view.dim())
    throw std::invalid_argument("dimension mismatch");
  TiltedApprox a;
  a.node = node;
  a.obj = obj;
  a.view = view;
  a.anchor_w = anchor_w;
  a.anchor_g = anchor_g;
  a.local_grad_at_anchor = local_loss_and_gradient(obj, view, anchor_w).grad;
  a.tilt = anchor_g;
  axpy(-obj.lambda, anchor_w, a.tilt);
  axpy(-1.0, a.local_grad_at_anchor, a.tilt);
  return a;
}

inline std::pair<double, Vec> approx_value_grad(const TiltedApprox &a, const Vec &w) {
  if (w.size() != a.anchor_w.size()) throw std::invalid_argument("dimension mismatch");
  LocalLossGrad lg = local_loss_and_gradient(a.obj, a.view, w);
  double value = 0.5 * a.obj.lambda * norm2_sq(w) + lg.value;
  for (std::size_t i = 0; i < w.size(); ++i) value += a.tilt[i] * (w[i] - a.anchor_w[i]);
  Vec grad = std::move(lg.grad);
  axpy(a.obj.lambda, w, grad);
  axpy(1.0, a.tilt, grad);
  return {value, std::move(grad)};
}

inline Vec approx_gradient(const TiltedApprox &a, const Vec &w) {
  return approx_value_grad(a, w).second;
}

// Gradient of the j-th finite-sum component
//   psi_j(w) = l(w.x_j, y_j) + (lambda/2 ||w||^2 + c.(w - w_r)) / n_p
// so that sum_j grad psi_j = grad fhat_p.
inline Vec stochastic_component_grad(const TiltedApprox &a, const Vec &w, std::size_t j) {
  if (j >= a.n_local()) throw std::out_of_range("component index out of range");
  if (w.size() != a.anchor_w.size()) throw std::invalid_argument("dimension mismatch");
  const double inv_n = 1.0 / static_cast<double>(a.n_local());
  Vec g(w.size());
  for (std::size_t i = 0; i < w.size(); ++i)
    g[i] = (a.obj.lambda * w[i] + a.tilt[i]) * inv_n;
  const Example &ex = a.view.example(j);
  ex.features.add_scaled_to(loss_eval(a.obj.loss, ex.features.dot_dense(w), ex.label).slope, g);
  return g;
}

}  // namespace dsgd

#endif  // DSGD_APPROX_HPP
