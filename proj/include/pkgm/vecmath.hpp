#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace pkgm {

inline double l1_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::fabs(x);
  return s;
}

inline double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// sign with sign(0) = 0; the L1 subgradient convention used throughout.
inline double sgn(double x) { return (x > 0.0) - (x < 0.0); }

// out = M * x, M row-major (rows x cols), x of length cols.
inline void matvec(std::span<const double> m, std::span<const double> x,
                   std::span<double> out) {
  const size_t rows = out.size(), cols = x.size();
  for (size_t i = 0; i < rows; ++i) {
    double acc = 0.0;
    const double* row = m.data() + i * cols;
    for (size_t j = 0; j < cols; ++j) acc += row[j] * x[j];
    out[i] = acc;
  }
}

// out = M^T * x, M row-major (rows x cols), x of length rows.
inline void matvec_t(std::span<const double> m, std::span<const double> x,
                     std::span<double> out) {
  const size_t cols = out.size(), rows = x.size();
  for (size_t j = 0; j < cols; ++j) out[j] = 0.0;
  for (size_t i = 0; i < rows; ++i) {
    const double* row = m.data() + i * cols;
    const double xi = x[i];
    for (size_t j = 0; j < cols; ++j) out[j] += row[j] * xi;
  }
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// Numerically stable logistic function.
inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace pkgm
