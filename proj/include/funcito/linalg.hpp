#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace funcito {

using Vec = std::vector<double>;
// Dense d x d matrix, row-major.
using Mat = std::vector<double>;

// Compensated (Kahan) accumulator. Summation order still matters for bit
// reproducibility; callers must keep a fixed order.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

inline double sup_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double sup_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

// max_ij |m - m^T| for a d x d row-major matrix.
inline double asymmetry(std::span<const double> m, int d) {
  double worst = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      worst = std::max(worst, std::abs(m[i * d + j] - m[j * d + i]));
  return worst;
}

// Smallest and largest eigenvalue of a symmetric d x d matrix.
std::pair<double, double> sym_eig_range(std::span<const double> m, int d);

// Determinant of a d x d matrix.
double determinant(std::span<const double> m, int d);

// y += alpha * M x  (M row-major d x d)
inline void matvec_acc(std::span<const double> m, std::span<const double> x, double alpha,
                       std::span<double> y) {
  const int d = static_cast<int>(x.size());
  for (int i = 0; i < d; ++i) {
    double s = 0.0;
    for (int j = 0; j < d; ++j) s += m[i * d + j] * x[j];
    y[i] += alpha * s;
  }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// x^T M y for row-major d x d M.
inline double quad_form(std::span<const double> x, std::span<const double> m,
                        std::span<const double> y) {
  const int d = static_cast<int>(x.size());
  double s = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) s += x[i] * m[i * d + j] * y[j];
  return s;
}

}  // namespace funcito
