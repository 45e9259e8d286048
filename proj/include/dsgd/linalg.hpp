#ifndef DSGD_LINALG_HPP
#define DSGD_LINALG_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace dsgd {

using Vec = std::vector<double>;

inline void check_same_dim(const Vec &a, const Vec &b) {
  if (a.size() != b.size())
    throw std::invalid_argument("dimension mismatch: " +
                                std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
}

inline double dot(const Vec &a, const Vec &b) {
  check_same_dim(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2_sq(const Vec &a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return s;
}

inline double norm2(const Vec &a) { return std::sqrt(norm2_sq(a)); }

inline double norm_inf(const Vec &a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::fabs(v));
  return m;
}

// y += c * x
inline void axpy(double c, const Vec &x, Vec &y) {
  check_same_dim(x, y);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline void scale(double c, Vec &x) {
  for (double &v : x) v *= c;
}

inline bool all_finite(const Vec &x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace dsgd

#endif  // DSGD_LINALG_HPP
