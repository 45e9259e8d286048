#ifndef DSGD_DRIVER_HPP
#define DSGD_DRIVER_HPP

#include <chrono>
#include <functional>
#include <random>
#include <string>

#include "dsgd/approx.hpp"
#include "dsgd/cluster.hpp"
#include "dsgd/lbfgs.hpp"
#include "dsgd/loss.hpp"
#include "dsgd/metrics.hpp"
#include "dsgd/search.hpp"
#include "dsgd/svrg.hpp"

namespace dsgd {

enum class Method { FS, SQM, Hybrid };

inline Method method_from_string(const std::string &s) {
  if (s == "FS" || s == "fs") return Method::FS;
  if (s == "SQM" || s == "sqm") return Method::SQM;
  if (s == "Hybrid" || s == "hybrid") return Method::Hybrid;
  throw std::invalid_argument("unknown method '" + s + "'");
}

inline const char *to_string(Method m) {
  switch (m) {
    case Method::FS: return "FS";
    case Method::SQM: return "SQM";
    case Method::Hybrid: return "Hybrid";
  }
  return "?";
}

struct RunConfig {
  Method method = Method::FS;
  int P = 1;
  unsigned threads = 0;  // worker pool size; 0 = hardware concurrency
  SvrgConfig svrg;
  SafeguardConfig safeguard;
  LineSearchConfig linesearch;
  int max_outer_iters = 100;
  double grad_tol = 1e-8;  // on |g|_inf; <= 0 disables
  double gap_tol = 0.0;    // on (f-f*)/f*; <= 0 disables; needs a reference
  std::uint64_t seed = 0;
  std::size_t lbfgs_memory = 10;

  void validate() const {
    if (P < 1) throw std::invalid_argument("P must be >= 1");
    if (max_outer_iters < 0) throw std::invalid_argument("max_outer_iters must be >= 0");
    if (grad_tol <= 0.0 && gap_tol <= 0.0 && max_outer_iters == 0)
      return;  // degenerate but allowed: immediate stop
    svrg.validate();
    safeguard.validate();
    linesearch.validate();
  }
};

struct IterationRecord {
  int r = 0;
  double f = 0.0;
  double gap = -1.0;  // -1 when no reference is available
  double gnorm = 0.0; // |g|_2
  double t = 0.0;
  std::uint64_t passes = 0;       // cumulative, at the time f and g were known
  std::uint64_t scalar_msgs = 0;  // cumulative, same snapshot
  int safeguards = 0;             // node directions replaced by -g this iteration
  int epochs = 0;                 // sgd epochs per node this iteration
  double wall_ms = 0.0;
};

// One completed outer iteration, exposed for auditing. Pointers are valid
// only during the callback.
struct IterationAudit {
  int r = 0;
  const Vec *w = nullptr;  // w^r
  const Vec *g = nullptr;  // g^r
  const Vec *d = nullptr;  // d^r
  double t = 0.0;
  double f = 0.0;       // f(w^r)
  double f_next = 0.0;  // f(w^r + t d^r)
  double gd = 0.0;      // g^r . d^r
  const std::vector<TiltedApprox> *approxes = nullptr;       // FS only
  const std::vector<std::uint8_t> *safeguard_flags = nullptr;  // FS only
};

using Observer = std::function<void(const IterationAudit &)>;

struct RunResult {
  Vec w;
  std::vector<IterationRecord> trace;
  CommLedger ledger;
  std::string stop_reason;
  int linesearch_fallbacks = 0;  // Armijo-only steps accepted in non-strict mode
};

struct StopDecision {
  bool stop = false;
  std::string reason;
};

inline StopDecision check_stop(double gnorm_inf, double f, int r, const RunConfig &cfg,
                               const ReferenceSolution *ref) {
  if (cfg.gap_tol > 0.0 && ref == nullptr)
    throw std::invalid_argument("gap stopping rule requires a reference solution");
  if (cfg.grad_tol > 0.0 && gnorm_inf <= cfg.grad_tol) return {true, "grad_tol"};
  if (cfg.gap_tol > 0.0 && relative_gap(f, *ref, false) <= cfg.gap_tol)
    return {true, "gap_tol"};
  if (r >= cfg.max_outer_iters) return {true, "max_outer_iters"};
  return {false, ""};
}

namespace detail {

class OuterLoop {
 public:
  OuterLoop(const Dataset &data, const PartitionPlan &plan, const Objective &obj,
            const RunConfig &cfg, const ReferenceSolution *ref, const Observer &obs)
      : data_(data),
        obj_(obj),
        cfg_(cfg),
        ref_(ref),
        obs_(obs),
        cluster_(data, plan, cfg.seed, cfg.threads),
        started_(std::chrono::steady_clock::now()) {
    obj_.validate();
    cfg_.validate();
    const int P = cluster_.node_count();
    node_grads_.resize(P);
    node_scalars_.resize(P);
    node_dirs_.resize(P);
    node_s_.resize(P);
    node_rngs_.reserve(P);
    for (int p = 0; p < P; ++p) node_rngs_.emplace_back(cluster_.node(p).rng_seed);
  }

  RunResult run() {
    Vec w(data_.dim, 0.0);
    if (cfg_.method == Method::Hybrid && cfg_.max_outer_iters > 0) hybrid_init(w);

    LbfgsMemory mem(cfg_.lbfgs_memory);
    Vec prev_g, prev_step;
    RunResult out;
    const bool is_fs = cfg_.method == Method::FS;

    for (int r = 0;; ++r) {
      if (r >= cfg_.max_outer_iters) {
        out.stop_reason = "max_outer_iters";
        break;
      }
      auto [f, g] = distributed_value_grad(w);
      IterationRecord rec;
      rec.r = r;
      rec.f = f;
      rec.gnorm = norm2(g);
      if (ref_) rec.gap = relative_gap(f, *ref_, false);
      rec.passes = cluster_.ledger().passes;
      rec.scalar_msgs = cluster_.ledger().scalar_msgs;

      // r < max_outer_iters here, so only the grad/gap rules can fire
      StopDecision stop = check_stop(norm_inf(g), f, r, cfg_, ref_);
      if (stop.stop) {
        finish_record(rec);
        out.trace.push_back(rec);
        out.stop_reason = stop.reason;
        break;
      }

      Vec d;
      int safeguards = 0;
      if (is_fs) {
        d = fs_direction(w, g, safeguards);
      } else {
        if (r > 0) mem.push(prev_step, [&] {
          Vec y = g;
          axpy(-1.0, prev_g, y);
          return y;
        }());
        d = mem.direction(g);
        if (dot(g, d) >= 0.0) {  // numerical breakdown: restart from -g
          mem.clear();
          d = mem.direction(g);
        }
      }

      const double gd = dot(g, d);
      refresh_direction_margins(d);
      double f_next, t;
      if (!accept_step(w, d, f, gd, t, f_next, out)) {
        finish_record(rec);
        out.trace.push_back(rec);
        out.stop_reason = "line_search_failure";
        break;
      }

      if (obs_) {
        IterationAudit audit;
        audit.r = r;
        audit.w = &w;
        audit.g = &g;
        audit.d = &d;
        audit.t = t;
        audit.f = f;
        audit.f_next = f_next;
        audit.gd = gd;
        if (is_fs) {
          audit.approxes = &approxes_;
          audit.safeguard_flags = &safeguard_flags_;
        }
        obs_(audit);
      }

      // w^{r+1} = w^r + t d^r; node margin caches advance by t * s_i
      axpy(t, d, w);
      cluster_.for_each_node([&](NodeContext &node) {
        for (std::size_t j = 0; j < node.z.size(); ++j)
          node.z[j] += t * node_s_[node.id][j];
      });

      if (!is_fs) {
        prev_g = g;
        prev_step = d;
        scale(t, prev_step);
      }

      rec.t = t;
      rec.safeguards = safeguards;
      rec.epochs = is_fs ? cfg_.svrg.epochs : (cfg_.method == Method::Hybrid && r == 0 ? 1 : 0);
      finish_record(rec);
      out.trace.push_back(rec);
    }
    out.w = std::move(w);
    out.ledger = cluster_.ledger();
    return out;
  }

 private:
  void finish_record(IterationRecord &rec) {
    rec.wall_ms = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - started_)
                      .count();
  }

  // Algorithm step 1: broadcast w, local loss/gradients with the margin
  // by-product, aggregate. f rides along as a scalar reduction.
  std::pair<double, Vec> distributed_value_grad(const Vec &w) {
    const Vec &wb = cluster_.broadcast(w, CommPhase::broadcast_w);
    cluster_.for_each_node([&](NodeContext &node) {
      node.z = compute_margins(node.view, wb);
      LocalLossGrad lg;
      lg.grad.assign(wb.size(), 0.0);
      for (std::size_t j = 0; j < node.view.size(); ++j) {
        const Example &ex = node.view.example(j);
        const LossEval le = loss_eval(obj_.loss, node.z[j], ex.label);
        lg.value += le.value;
        ex.features.add_scaled_to(le.slope, lg.grad);
      }
      node_grads_[node.id] = std::move(lg.grad);
      node_scalars_[node.id] = {lg.value};
    });
    Vec g = cluster_.reduce_sum(node_grads_, CommPhase::reduce_g);
    axpy(obj_.lambda, w, g);
    const double loss_sum = cluster_.reduce_scalars(node_scalars_)[0];
    return {0.5 * obj_.lambda * norm2_sq(w) + loss_sum, std::move(g)};
  }

  // Algorithm steps 3-7: per-node tilted approximation, SVRG, safeguard,
  // uniform convex combination. The d_p aggregation is one pass.
  Vec fs_direction(const Vec &w, const Vec &g, int &safeguards) {
    const int P = cluster_.node_count();
    approxes_.assign(P, TiltedApprox{});
    safeguard_flags_.assign(P, 0);
    std::vector<std::string> node_errors(P);
    cluster_.for_each_node([&](NodeContext &node) {
      try {
        TiltedApprox a = build_approx(obj_, node.view, node.id, w, g);
        Vec wp = run_svrg(a, w, cfg_.svrg, node_rngs_[node.id]);
        Vec dp = std::move(wp);
        axpy(-1.0, w, dp);
        SafeguardResult sg = safeguard(dp, g, cfg_.safeguard);
        safeguard_flags_[node.id] = sg.replaced ? 1 : 0;
        node_dirs_[node.id] = std::move(sg.direction);
        approxes_[node.id] = std::move(a);
      } catch (const std::exception &e) {
        node_errors[node.id] = e.what();
      }
    });
    for (const std::string &err : node_errors)
      if (!err.empty()) throw std::runtime_error("node failure: " + err);
    for (int p = 0; p < P; ++p) safeguards += safeguard_flags_[p];
    cluster_.ledger().add_pass(CommPhase::reduce_d);
    std::vector<double> weights(P, 1.0 / P);
    return combine(node_dirs_, weights);
  }

  // s_i = d . x_i, computed node-locally after the direction aggregation
  // (charged there; no additional pass).
  void refresh_direction_margins(const Vec &d) {
    cluster_.for_each_node([&](NodeContext &node) {
      node_s_[node.id] = compute_margins(node.view, d);
    });
  }

  // Algorithm step 8. Each trial t exchanges only the scalar pair
  // (sum l, sum l' s_i); the lambda terms are master-side.
  bool accept_step(const Vec &w, const Vec &d, double f0, double gd, double &t_out,
                   double &f_next, RunResult &out) {
    const double wd = dot(w, d);
    const double dd = norm2_sq(d);
    const double ww = norm2_sq(w);
    auto phi = [&](double t) {
      cluster_.for_each_node([&](NodeContext &node) {
        double lsum = 0.0, ssum = 0.0;
        const auto &s = node_s_[node.id];
        for (std::size_t j = 0; j < node.view.size(); ++j) {
          const LossEval le =
              loss_eval(obj_.loss, node.z[j] + t * s[j], node.view.example(j).label);
          lsum += le.value;
          ssum += le.slope * s[j];
        }
        node_scalars_[node.id] = {lsum, ssum};
      });
      std::vector<double> agg = cluster_.reduce_scalars(node_scalars_);
      const double value =
          0.5 * obj_.lambda * (ww + 2.0 * t * wd + t * t * dd) + agg[0];
      const double deriv = obj_.lambda * (wd + t * dd) + agg[1];
      return std::make_pair(value, deriv);
    };
    try {
      LineSearchResult ls = line_search(phi, f0, gd, cfg_.linesearch);
      t_out = ls.t;
      f_next = ls.phi;
      return true;
    } catch (const LineSearchFailure &e) {
      if (!cfg_.linesearch.strict && e.best_armijo_t()) {
        ++out.linesearch_fallbacks;
        std::cerr << "warning: line search budget exhausted; accepting Armijo-only step\n";
        t_out = *e.best_armijo_t();
        f_next = phi(t_out).first;
        return true;
      }
      if (cfg_.linesearch.strict) throw;
      return false;
    }
  }

  // Parameter-mixing initialization: one plain SGD epoch per node on the
  // untilted local objective from w = 0, then averaging (one pass).
  void hybrid_init(Vec &w) {
    cluster_.for_each_node([&](NodeContext &node) {
      const double eta = cfg_.svrg.step_size < 0.0
                             ? auto_step_size(obj_, node.view)
                             : cfg_.svrg.step_size;
      Vec w0(data_.dim, 0.0);
      node_dirs_[node.id] =
          plain_sgd_epoch(obj_, node.view, w0, eta, cfg_.svrg.sampling, node_rngs_[node.id]);
    });
    w = cluster_.reduce_sum(node_dirs_, CommPhase::init_mix);
    scale(1.0 / cluster_.node_count(), w);
  }

  const Dataset &data_;
  Objective obj_;
  RunConfig cfg_;
  const ReferenceSolution *ref_;
  Observer obs_;
  Cluster cluster_;
  std::chrono::steady_clock::time_point started_;
  std::vector<Vec> node_grads_;
  std::vector<std::vector<double>> node_scalars_;
  std::vector<Vec> node_dirs_;
  std::vector<std::vector<double>> node_s_;
  std::vector<std::mt19937_64> node_rngs_;
  std::vector<TiltedApprox> approxes_;
  std::vector<std::uint8_t> safeguard_flags_;
};

}  // namespace detail

inline RunResult run_method(const Dataset &data, const PartitionPlan &plan,
                            const Objective &obj, const RunConfig &cfg,
                            const ReferenceSolution *ref = nullptr,
                            const Observer &obs = {}) {
  detail::OuterLoop loop(data, plan, obj, cfg, ref, obs);
  return loop.run();
}

inline RunResult run_fs(const Dataset &data, const PartitionPlan &plan, const Objective &obj,
                        RunConfig cfg, const ReferenceSolution *ref = nullptr,
                        const Observer &obs = {}) {
  cfg.method = Method::FS;
  return run_method(data, plan, obj, cfg, ref, obs);
}

inline RunResult run_sqm(const Dataset &data, const PartitionPlan &plan, const Objective &obj,
                         RunConfig cfg, const ReferenceSolution *ref = nullptr,
                         const Observer &obs = {}) {
  cfg.method = Method::SQM;
  return run_method(data, plan, obj, cfg, ref, obs);
}

inline RunResult run_hybrid(const Dataset &data, const PartitionPlan &plan,
                            const Objective &obj, RunConfig cfg,
                            const ReferenceSolution *ref = nullptr,
                            const Observer &obs = {}) {
  cfg.method = Method::Hybrid;
  return run_method(data, plan, obj, cfg, ref, obs);
}

}  // namespace dsgd

#endif  // DSGD_DRIVER_HPP
