#ifndef DSGD_REFERENCE_HPP
#define DSGD_REFERENCE_HPP

#include <fstream>
#include <string>

#include "dsgd/driver.hpp"
#include "dsgd/metrics.hpp"

namespace dsgd {

class ReferenceNotConverged : public std::runtime_error {
 public:
  explicit ReferenceNotConverged(double achieved)
      : std::runtime_error("reference solve stopped at |g|_inf = " + std::to_string(achieved)),
        achieved_(achieved) {}
  double achieved_grad_norm() const { return achieved_; }

 private:
  double achieved_;
};

// High-precision solution via the batch optimizer, |g|_inf tolerance 1e-12.
inline ReferenceSolution solve_reference(const Objective &obj, const Dataset &data,
                                         int max_iters = 20000) {
  RunConfig cfg;
  cfg.method = Method::SQM;
  cfg.P = 1;
  cfg.threads = 1;
  cfg.grad_tol = 1e-12;
  cfg.max_outer_iters = max_iters;
  cfg.linesearch.max_evals = 100;
  PartitionPlan plan = partition(data, 1, PartitionStrategy::round_robin);
  RunResult res = run_sqm(data, plan, obj, cfg);
  ReferenceSolution ref;
  ref.w_star = std::move(res.w);
  ref.f_star = objective_value(obj, data, ref.w_star);
  ref.achieved_grad_norm = norm_inf(objective_gradient(obj, data, ref.w_star));
  if (ref.achieved_grad_norm > cfg.grad_tol) throw ReferenceNotConverged(ref.achieved_grad_norm);
  return ref;
}

inline void save_reference(const ReferenceSolution &ref, const Objective &obj,
                           const std::string &path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write reference file " + path);
  char buf[64];
  out << "dim " << ref.w_star.size() << "\n";
  out << "loss " << to_string(obj.loss) << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", obj.lambda);
  out << "lambda " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", ref.f_star);
  out << "f_star " << buf << "\n";
  std::snprintf(buf, sizeof(buf), "%.17g", ref.achieved_grad_norm);
  out << "grad_norm " << buf << "\n";
  for (double v : ref.w_star) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf << "\n";
  }
}

inline ReferenceSolution load_reference(const std::string &path, const Objective &expect_obj) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read reference file " + path);
  ReferenceSolution ref;
  std::string key, loss_name;
  std::size_t dim;
  double lambda;
  if (!(in >> key >> dim) || key != "dim") throw std::runtime_error("bad reference file");
  if (!(in >> key >> loss_name) || key != "loss") throw std::runtime_error("bad reference file");
  if (!(in >> key >> lambda) || key != "lambda") throw std::runtime_error("bad reference file");
  if (!(in >> key >> ref.f_star) || key != "f_star") throw std::runtime_error("bad reference file");
  if (!(in >> key >> ref.achieved_grad_norm) || key != "grad_norm")
    throw std::runtime_error("bad reference file");
  if (loss_kind_from_string(loss_name) != expect_obj.loss || lambda != expect_obj.lambda)
    throw std::runtime_error("reference file objective does not match requested objective");
  ref.w_star.resize(dim);
  for (double &v : ref.w_star)
    if (!(in >> v)) throw std::runtime_error("truncated reference file");
  return ref;
}

}  // namespace dsgd

#endif  // DSGD_REFERENCE_HPP
