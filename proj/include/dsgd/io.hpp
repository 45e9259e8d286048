#ifndef DSGD_IO_HPP
#define DSGD_IO_HPP

#include <zlib.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "dsgd/data.hpp"
#include "dsgd/driver.hpp"

namespace dsgd {

inline std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline bool ends_with(const std::string &s, const std::string &suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

inline std::string read_file_maybe_gzip(const std::string &path) {
  if (ends_with(path, ".gz")) {
    gzFile gz = gzopen(path.c_str(), "rb");
    if (!gz) throw std::runtime_error("cannot open " + path);
    std::string out;
    char buf[1 << 16];
    int n;
    while ((n = gzread(gz, buf, sizeof(buf))) > 0) out.append(buf, n);
    const bool bad = n < 0;
    gzclose(gz);
    if (bad) throw std::runtime_error("gzip read error on " + path);
    return out;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Dataset load_libsvm(const std::string &path, std::size_t declared_dim = 0) {
  std::istringstream in(read_file_maybe_gzip(path));
  return parse_libsvm(in, declared_dim);
}

inline const char *trace_csv_header() {
  return "r,f,gap,gnorm,t,passes,scalar_msgs,safeguards,epochs,wall_ms";
}

inline void write_trace_csv(const std::vector<IterationRecord> &trace, std::ostream &out,
                            bool include_wall_time = true) {
  out << trace_csv_header() << "\n";
  for (const IterationRecord &rec : trace) {
    out << rec.r << ',' << fmt_g17(rec.f) << ',' << fmt_g17(rec.gap) << ','
        << fmt_g17(rec.gnorm) << ',' << fmt_g17(rec.t) << ',' << rec.passes << ','
        << rec.scalar_msgs << ',' << rec.safeguards << ',' << rec.epochs << ','
        << (include_wall_time ? fmt_g17(rec.wall_ms) : std::string("0")) << "\n";
  }
}

inline void write_trace_csv(const std::vector<IterationRecord> &trace, const std::string &path,
                            bool include_wall_time = true) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace file " + path);
  write_trace_csv(trace, out, include_wall_time);
}

// Model file: `dim <n>`, `loss <kind>`, `lambda <v>` header, then one weight
// per line.
inline void write_model(const Vec &w, const Objective &obj, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file " + path);
  out << "dim " << w.size() << "\n";
  out << "loss " << to_string(obj.loss) << "\n";
  out << "lambda " << fmt_g17(obj.lambda) << "\n";
  for (double v : w) out << fmt_g17(v) << "\n";
}

inline Vec read_model(const std::string &path, Objective *obj_out = nullptr) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read model file " + path);
  std::string key, loss_name;
  std::size_t dim;
  double lambda;
  if (!(in >> key >> dim) || key != "dim") throw std::runtime_error("bad model file");
  if (!(in >> key >> loss_name) || key != "loss") throw std::runtime_error("bad model file");
  if (!(in >> key >> lambda) || key != "lambda") throw std::runtime_error("bad model file");
  if (obj_out) {
    obj_out->loss = loss_kind_from_string(loss_name);
    obj_out->lambda = lambda;
  }
  Vec w(dim);
  for (double &v : w)
    if (!(in >> v)) throw std::runtime_error("truncated model file");
  return w;
}

}  // namespace dsgd

#endif  // DSGD_IO_HPP
