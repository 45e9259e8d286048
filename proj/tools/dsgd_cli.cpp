// Command-line driver: train one method, compare all three, compute a
// high-precision reference, inspect a dataset, or emit the synthetic fixture.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "dsgd/dsgd.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string train_path;
  std::string eval_path;
  std::string out_dir = ".";
  std::string reference_path;
  std::string method = "FS";
  std::string loss = "squared-hinge";
  std::string partition_strategy = "round-robin";
  double lambda = 1e-3;
  int nodes = 4;
  int epochs = 4;
  double step_size = -1.0;
  double tau = 0.0;
  double alpha = 1e-4;
  double beta = 0.9;
  std::uint64_t seed = 0;
  int max_outer_iters = 100;
  double grad_tol = 1e-8;
  double gap_tol = 0.0;
  unsigned threads = 0;
  std::size_t dim = 0;
  bool strict_linesearch = false;
  bool no_wall_time = false;
};

void add_common(CLI::App *cmd, CommonOpts &o, bool needs_data) {
  auto *train = cmd->add_option("--train", o.train_path, "training data, libsvm format (.gz ok)");
  if (needs_data) train->required();
  cmd->add_option("--eval", o.eval_path, "held-out data for AUPRC (libsvm format)");
  cmd->add_option("--out", o.out_dir, "output directory");
  cmd->add_option("--reference", o.reference_path, "reference solution file (read, or written by `reference`)");
  cmd->add_option("--loss", o.loss, "loss kind: logistic | squared-hinge | least-squares");
  cmd->add_option("--lambda", o.lambda, "L2 regularization constant (> 0)");
  cmd->add_option("--nodes", o.nodes, "simulated node count P");
  cmd->add_option("--epochs", o.epochs, "SGD epochs s per node per outer iteration");
  cmd->add_option("--step-size", o.step_size, "inner SGD step size (negative = auto)");
  cmd->add_option("--tau", o.tau, "safeguard cosine threshold in [0,1)");
  cmd->add_option("--alpha", o.alpha, "Armijo constant");
  cmd->add_option("--beta", o.beta, "Wolfe constant");
  cmd->add_option("--seed", o.seed, "RNG seed");
  cmd->add_option("--max-outer-iters", o.max_outer_iters, "outer iteration budget");
  cmd->add_option("--grad-tol", o.grad_tol, "stop when |g|_inf <= this (<=0 disables)");
  cmd->add_option("--gap-tol", o.gap_tol, "stop when (f-f*)/f* <= this; needs --reference");
  cmd->add_option("--threads", o.threads, "worker pool size (0 = hardware)");
  cmd->add_option("--dim", o.dim, "declared feature dimension (0 = infer from data)");
  cmd->add_option("--partition", o.partition_strategy, "round-robin | contiguous | shuffled");
  cmd->add_flag("--strict-linesearch", o.strict_linesearch, "fail instead of accepting Armijo-only steps");
  cmd->add_flag("--no-wall-time", o.no_wall_time, "write 0 in the wall_ms trace column");
  cmd->set_config("--config", "", "flat key=value config file; CLI flags override");
}

dsgd::Objective make_objective(const CommonOpts &o) {
  dsgd::Objective obj{dsgd::loss_kind_from_string(o.loss), o.lambda};
  obj.validate();
  return obj;
}

dsgd::RunConfig make_run_config(const CommonOpts &o) {
  dsgd::RunConfig cfg;
  cfg.method = dsgd::method_from_string(o.method);
  cfg.P = o.nodes;
  cfg.threads = o.threads;
  cfg.svrg.epochs = o.epochs;
  cfg.svrg.step_size = o.step_size;
  cfg.svrg.seed = o.seed;
  cfg.safeguard.tau = o.tau;
  cfg.linesearch.alpha = o.alpha;
  cfg.linesearch.beta = o.beta;
  cfg.linesearch.strict = o.strict_linesearch;
  cfg.max_outer_iters = o.max_outer_iters;
  cfg.grad_tol = o.grad_tol;
  cfg.gap_tol = o.gap_tol;
  cfg.seed = o.seed;
  cfg.validate();
  return cfg;
}

std::vector<double> score_dataset(const dsgd::Dataset &ds, const dsgd::Vec &w) {
  std::vector<double> scores(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i)
    scores[i] = ds.examples[i].features.dot_dense(w);
  return scores;
}

std::vector<int> labels_of(const dsgd::Dataset &ds) {
  std::vector<int> y(ds.size());
  for (std::size_t i = 0; i < ds.size(); ++i) y[i] = ds.examples[i].label;
  return y;
}

int cmd_train(const CommonOpts &o) {
  dsgd::Dataset data = dsgd::load_libsvm(o.train_path, o.dim);
  dsgd::Objective obj = make_objective(o);
  dsgd::RunConfig cfg = make_run_config(o);
  dsgd::PartitionPlan plan = dsgd::partition(
      data, cfg.P, dsgd::partition_strategy_from_string(o.partition_strategy), o.seed);

  dsgd::ReferenceSolution ref;
  bool have_ref = false;
  if (!o.reference_path.empty() && fs::exists(o.reference_path)) {
    ref = dsgd::load_reference(o.reference_path, obj);
    have_ref = true;
  }
  dsgd::RunResult res =
      dsgd::run_method(data, plan, obj, cfg, have_ref ? &ref : nullptr);

  fs::create_directories(o.out_dir);
  const std::string trace_path = o.out_dir + "/trace.csv";
  const std::string model_path = o.out_dir + "/model.txt";
  dsgd::write_trace_csv(res.trace, trace_path, !o.no_wall_time);
  dsgd::write_model(res.w, obj, model_path);

  // run summary: exactly these key=value fields
  std::cout << "method=" << dsgd::to_string(cfg.method) << "\n";
  std::cout << "iterations=" << res.trace.size() << "\n";
  std::cout << "stop_reason=" << res.stop_reason << "\n";
  if (!res.trace.empty()) {
    std::cout << "initial_f=" << dsgd::fmt_g17(res.trace.front().f) << "\n";
    std::cout << "final_f=" << dsgd::fmt_g17(res.trace.back().f) << "\n";
    if (have_ref) {
      std::cout << "initial_gap=" << dsgd::fmt_g17(res.trace.front().gap) << "\n";
      std::cout << "final_gap=" << dsgd::fmt_g17(res.trace.back().gap) << "\n";
    }
  }
  std::cout << "passes=" << res.ledger.passes << "\n";
  std::cout << "scalar_msgs=" << res.ledger.scalar_msgs << "\n";
  if (!o.eval_path.empty()) {
    dsgd::Dataset eval = dsgd::load_libsvm(o.eval_path, res.w.size());
    std::cout << "auprc=" << dsgd::fmt_g17(dsgd::auprc(score_dataset(eval, res.w), labels_of(eval)))
              << "\n";
  }
  std::cout << "trace=" << trace_path << "\n";
  std::cout << "model=" << model_path << "\n";
  return 0;
}

int cmd_compare(const CommonOpts &o) {
  dsgd::Dataset data = dsgd::load_libsvm(o.train_path, o.dim);
  dsgd::Objective obj = make_objective(o);
  dsgd::PartitionPlan plan = dsgd::partition(
      data, o.nodes, dsgd::partition_strategy_from_string(o.partition_strategy), o.seed);

  dsgd::ReferenceSolution ref;
  if (!o.reference_path.empty() && fs::exists(o.reference_path)) {
    ref = dsgd::load_reference(o.reference_path, obj);
  } else {
    ref = dsgd::solve_reference(obj, data);
    if (!o.reference_path.empty()) dsgd::save_reference(ref, obj, o.reference_path);
  }

  fs::create_directories(o.out_dir);
  for (dsgd::Method m : {dsgd::Method::FS, dsgd::Method::SQM, dsgd::Method::Hybrid}) {
    CommonOpts mo = o;
    mo.method = dsgd::to_string(m);
    dsgd::RunConfig cfg = make_run_config(mo);
    dsgd::RunResult res = dsgd::run_method(data, plan, obj, cfg, &ref);
    std::string name = mo.method;
    for (char &c : name) c = static_cast<char>(std::tolower(c));
    const std::string path = o.out_dir + "/" + name + ".csv";
    dsgd::write_trace_csv(res.trace, path, !o.no_wall_time);
    std::cout << name << "_trace=" << path << "\n";
    std::cout << name << "_passes=" << res.ledger.passes << "\n";
    if (!res.trace.empty())
      std::cout << name << "_final_gap=" << dsgd::fmt_g17(res.trace.back().gap) << "\n";
  }
  std::cout << "f_star=" << dsgd::fmt_g17(ref.f_star) << "\n";
  return 0;
}

int cmd_reference(const CommonOpts &o) {
  dsgd::Objective obj = make_objective(o);
  if (!o.reference_path.empty() && fs::exists(o.reference_path)) {
    dsgd::ReferenceSolution ref = dsgd::load_reference(o.reference_path, obj);
    std::cout << "cached=1\n";
    std::cout << "f_star=" << dsgd::fmt_g17(ref.f_star) << "\n";
    std::cout << "grad_norm=" << dsgd::fmt_g17(ref.achieved_grad_norm) << "\n";
    return 0;
  }
  dsgd::Dataset data = dsgd::load_libsvm(o.train_path, o.dim);
  dsgd::ReferenceSolution ref = dsgd::solve_reference(obj, data);
  std::string path = o.reference_path;
  if (path.empty()) {
    fs::create_directories(o.out_dir);
    path = o.out_dir + "/reference.txt";
  }
  dsgd::save_reference(ref, obj, path);
  std::cout << "cached=0\n";
  std::cout << "f_star=" << dsgd::fmt_g17(ref.f_star) << "\n";
  std::cout << "grad_norm=" << dsgd::fmt_g17(ref.achieved_grad_norm) << "\n";
  std::cout << "reference=" << path << "\n";
  return 0;
}

int cmd_inspect(const CommonOpts &o) {
  dsgd::Dataset data = dsgd::load_libsvm(o.train_path, o.dim);
  std::size_t nnz = 0, pos = 0;
  for (const dsgd::Example &ex : data.examples) {
    nnz += ex.features.indices.size();
    pos += ex.label > 0;
  }
  std::cout << "examples=" << data.size() << "\n";
  std::cout << "dim=" << data.dim << "\n";
  std::cout << "nnz=" << nnz << "\n";
  std::cout << "positives=" << pos << "\n";
  std::cout << "negatives=" << data.size() - pos << "\n";
  std::cout << "density=" << dsgd::fmt_g17(static_cast<double>(nnz) /
                                           (static_cast<double>(data.size()) * data.dim))
            << "\n";
  return 0;
}

struct SynthOpts {
  std::size_t n = 2000;
  std::size_t dim = 200;
  double density = 0.05;
  std::uint64_t seed = 42;
  std::string out = "synthetic.svm";
};

int cmd_synth(const SynthOpts &s) {
  dsgd::Dataset ds = dsgd::make_synthetic(s.n, s.dim, s.density, s.seed);
  std::ofstream out(s.out);
  if (!out) throw std::runtime_error("cannot write " + s.out);
  dsgd::serialize_libsvm(ds, out);
  std::cout << "examples=" << ds.size() << "\n";
  std::cout << "dim=" << ds.dim << "\n";
  std::cout << "file=" << s.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Distributed linear-classifier trainer (simulated cluster)"};
  app.require_subcommand(1);

  CommonOpts train_o, compare_o, ref_o, inspect_o;
  SynthOpts synth_o;

  auto *train = app.add_subcommand("train", "train one method, write trace + model + summary");
  add_common(train, train_o, true);
  train->add_option("--method", train_o.method, "FS | SQM | Hybrid");

  auto *compare = app.add_subcommand("compare", "run FS, SQM and Hybrid with aligned trace CSVs");
  add_common(compare, compare_o, true);

  auto *reference = app.add_subcommand("reference", "compute and persist a high-precision f*");
  add_common(reference, ref_o, false);

  auto *inspect = app.add_subcommand("inspect", "print dataset statistics");
  inspect->add_option("--train", inspect_o.train_path, "dataset to inspect")->required();
  inspect->add_option("--dim", inspect_o.dim, "declared feature dimension");

  auto *synth = app.add_subcommand("synth", "emit the deterministic synthetic fixture");
  synth->add_option("--n", synth_o.n, "example count");
  synth->add_option("--dim", synth_o.dim, "feature dimension");
  synth->add_option("--density", synth_o.density, "expected nonzero fraction");
  synth->add_option("--seed", synth_o.seed, "generator seed");
  synth->add_option("--out", synth_o.out, "output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) return cmd_train(train_o);
    if (compare->parsed()) return cmd_compare(compare_o);
    if (reference->parsed()) {
      if (ref_o.train_path.empty() &&
          (ref_o.reference_path.empty() || !fs::exists(ref_o.reference_path))) {
        std::cerr << "error: reference needs --train or an existing --reference file\n";
        return 1;
      }
      return cmd_reference(ref_o);
    }
    if (inspect->parsed()) return cmd_inspect(inspect_o);
    if (synth->parsed()) return cmd_synth(synth_o);
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
