#ifndef DSGD_SEARCH_HPP
#define DSGD_SEARCH_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>

#include "dsgd/linalg.hpp"
#include "dsgd/loss.hpp"

namespace dsgd {

struct SafeguardConfig {
  // Reject a node direction when cos(angle(-g, d_p)) <= tau. tau = 0 accepts
  // any strict descent direction.
  double tau = 0.0;

  void validate() const {
    if (tau < 0.0 || tau >= 1.0) throw std::invalid_argument("tau must lie in [0,1)");
  }
};

struct LineSearchConfig {
  double alpha = 1e-4;  // Armijo constant
  double beta = 0.9;    // Wolfe constant
  double t_init = 1.0;
  int max_evals = 50;
  bool strict = false;  // strict: never fall back to an Armijo-only step

  void validate() const {
    if (!(0.0 < alpha && alpha < beta && beta < 1.0))
      throw std::invalid_argument("need 0 < alpha < beta < 1");
    if (!(t_init > 0.0)) throw std::invalid_argument("t_init must be > 0");
    if (max_evals < 1) throw std::invalid_argument("max_evals must be >= 1");
  }
};

struct SafeguardResult {
  Vec direction;
  bool replaced = false;
};

inline SafeguardResult safeguard(const Vec &d_p, const Vec &g, const SafeguardConfig &cfg) {
  cfg.validate();
  check_same_dim(d_p, g);
  const double gnorm = norm2(g);
  if (gnorm == 0.0) throw std::invalid_argument("safeguard requires g != 0");
  const double dnorm = norm2(d_p);
  Vec neg_g(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) neg_g[i] = -g[i];
  if (dnorm == 0.0) return {std::move(neg_g), true};
  const double cosine = -dot(g, d_p) / (gnorm * dnorm);
  if (cosine <= cfg.tau) return {std::move(neg_g), true};
  return {d_p, false};
}

inline Vec combine(const std::vector<Vec> &directions, const std::vector<double> &weights) {
  if (directions.empty() || directions.size() != weights.size())
    throw std::invalid_argument("directions/weights size mismatch");
  double wsum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("combination weights must be >= 0");
    wsum += w;
  }
  if (std::fabs(wsum - 1.0) > 1e-12)
    throw std::invalid_argument("combination weights must sum to 1");
  Vec out(directions.front().size(), 0.0);
  for (std::size_t p = 0; p < directions.size(); ++p) axpy(weights[p], directions[p], out);
  return out;
}

class StaleCacheError : public std::runtime_error {
 public:
  StaleCacheError() : std::runtime_error("margin cache is stale for this (w, d) pair") {}
};

// phi(t) = f(w + t d) and phi'(t) from cached margins z = w.x_i, s = d.x_i.
// O(n) per evaluation, no feature-vector work.
inline std::pair<double, double> directional_eval(const Objective &obj, const Dataset &ds,
                                                  const MarginCache &cache,
                                                  std::uint64_t expect_z_stamp,
                                                  std::uint64_t expect_d_stamp, const Vec &w,
                                                  const Vec &d, double t) {
  if (cache.z_stamp != expect_z_stamp || cache.s_stamp != expect_d_stamp)
    throw StaleCacheError();
  if (cache.z.size() != ds.size() || cache.s.size() != ds.size())
    throw std::invalid_argument("cache length mismatch");
  double loss_sum = 0.0, slope_sum = 0.0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const LossEval le = loss_eval(obj.loss, cache.z[i] + t * cache.s[i], ds.examples[i].label);
    loss_sum += le.value;
    slope_sum += le.slope * cache.s[i];
  }
  const double wd = dot(w, d);
  const double value = 0.5 * obj.lambda * (norm2_sq(w) + 2.0 * t * wd + t * t * norm2_sq(d)) +
                       loss_sum;
  const double deriv = obj.lambda * (wd + t * norm2_sq(d)) + slope_sum;
  return {value, deriv};
}

class LineSearchFailure : public std::runtime_error {
 public:
  LineSearchFailure(std::optional<double> best_armijo_t, int evals)
      : std::runtime_error("line search budget exhausted after " + std::to_string(evals) +
                           " evaluations"),
        best_armijo_t_(best_armijo_t) {}
  std::optional<double> best_armijo_t() const { return best_armijo_t_; }

 private:
  std::optional<double> best_armijo_t_;
};

struct LineSearchResult {
  double t = 0.0;
  double phi = 0.0;
  double dphi = 0.0;
  int evals = 0;
};

// phi evaluator: t -> (phi(t), phi'(t))
using PhiFn = std::function<std::pair<double, double>(double)>;

namespace detail {

// cubic minimizer from (a, fa, da), (b, fb, db); falls back to the midpoint
inline double cubic_min(double a, double fa, double da, double b, double fb, double db) {
  const double h = b - a;
  if (h == 0.0) return a;
  const double d1 = da + db - 3.0 * (fb - fa) / h;
  const double disc = d1 * d1 - da * db;
  if (disc < 0.0) return 0.5 * (a + b);
  const double d2 = std::copysign(std::sqrt(disc), h);
  const double t = b - h * (db + d2 - d1) / (db - da + 2.0 * d2);
  if (!std::isfinite(t)) return 0.5 * (a + b);
  return t;
}

}  // namespace detail

// Bracket doubling from t_init, then interpolation, for a t satisfying both
//   Armijo: phi(t) <= phi(0) + alpha t phi'(0)
//   Wolfe:  phi'(t) >= beta phi'(0)
// Requires phi'(0) < 0.
inline LineSearchResult line_search(const PhiFn &phi, double phi0, double dphi0,
                                    const LineSearchConfig &cfg) {
  cfg.validate();
  if (!(dphi0 < 0.0)) throw std::invalid_argument("line search needs phi'(0) < 0");

  int evals = 0;
  std::optional<double> best_armijo;
  double best_armijo_phi = phi0;
  auto armijo_ok = [&](double t, double ft) { return ft <= phi0 + cfg.alpha * t * dphi0; };
  auto wolfe_ok = [&](double dt) { return dt >= cfg.beta * dphi0; };
  // Function values are only trusted beyond this resolution. Near the
  // optimum the predicted Armijo decrease can fall below what phi can
  // resolve; a trial is then judged by its (accurately computable) slope
  // instead of bracketing on a difference that is pure rounding noise.
  const double noise = 1e-13 * (1.0 + std::fabs(phi0));
  auto genuinely_violates = [&](double t, double ft, double phi_ref) {
    return !std::isfinite(ft) || ft > phi0 + cfg.alpha * t * dphi0 + noise ||
           ft > phi_ref + noise;
  };
  auto evaluate = [&](double t) {
    auto [ft, dt] = phi(t);
    ++evals;
    if (armijo_ok(t, ft) && ft <= best_armijo_phi) {
      best_armijo = t;
      best_armijo_phi = ft;
    }
    return std::make_pair(ft, dt);
  };
  auto fail = [&]() -> LineSearchResult {
    throw LineSearchFailure(best_armijo, evals);
  };

  // lo always satisfies Armijo; hi violates Armijo (or has phi >= phi(lo))
  double lo = 0.0, phi_lo = phi0, dphi_lo = dphi0;
  double hi = 0.0, phi_hi = 0.0, dphi_hi = 0.0;
  bool bracketed = false;

  double t = cfg.t_init;
  while (evals < cfg.max_evals) {
    auto [ft, dt] = evaluate(t);
    if (genuinely_violates(t, ft, phi_lo)) {
      hi = t;
      phi_hi = ft;
      dphi_hi = dt;
      bracketed = true;
      break;
    }
    if (wolfe_ok(dt)) return {t, ft, dt, evals};
    lo = t;
    phi_lo = ft;
    dphi_lo = dt;
    t *= 2.0;
  }
  if (!bracketed) return fail();

  // zoom: minimizer lies in (lo, hi)
  while (evals < cfg.max_evals) {
    double tj = detail::cubic_min(lo, phi_lo, dphi_lo, hi, phi_hi, dphi_hi);
    const double lo_t = std::min(lo, hi), hi_t = std::max(lo, hi);
    const double margin = 0.1 * (hi_t - lo_t);
    if (!(tj > lo_t + margin) || !(tj < hi_t - margin)) tj = 0.5 * (lo + hi);
    auto [ft, dt] = evaluate(tj);
    if (genuinely_violates(tj, ft, phi_lo)) {
      hi = tj;
      phi_hi = ft;
      dphi_hi = dt;
    } else {
      if (wolfe_ok(dt)) return {tj, ft, dt, evals};
      lo = tj;
      phi_lo = ft;
      dphi_lo = dt;
    }
    if (std::fabs(hi - lo) <= 1e-16 * std::max(1.0, std::fabs(lo))) break;
  }
  return fail();
}

}  // namespace dsgd

#endif  // DSGD_SEARCH_HPP
