#include "nodalab/special.hpp"

#include <cmath>
#include <numbers>

#include "nodalab/errors.hpp"

namespace nodalab::special {

double bessel_j0(double x) {
  x = std::abs(x);
  if (x <= 8.0) {
    const double q = -0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 60; ++k) {
      term *= q / (static_cast<double>(k) * static_cast<double>(k));
      sum += term;
      if (std::abs(term) < 1e-17 * std::abs(sum) && k > 2) break;
    }
    return sum;
  }
  // Miller: start well above x so the minimal solution dominates.
  int top = static_cast<int>(x + 8.0 * std::cbrt(x) + 30.0);
  if (top % 2 != 0) ++top;
  double next = 0.0;
  double cur = 1e-30;
  double norm = 0.0;
  double j0 = 0.0;
  for (int k = top; k > 0; --k) {
    const double prev = (2.0 * k / x) * cur - next;
    next = cur;
    cur = prev;
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * cur;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
    }
  }
  j0 = cur;
  norm += j0;
  return j0 / norm;
}

double legendre_p(int l, double x) {
  if (l < 0) throw DomainError("Legendre degree must be non-negative");
  if (l == 0) return 1.0;
  double p_prev = 1.0;
  double p = x;
  for (int k = 1; k < l; ++k) {
    const double p_next = ((2.0 * k + 1.0) * x * p - k * p_prev) / (k + 1.0);
    p_prev = p;
    p = p_next;
  }
  return p;
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

LegendreRow legendre_row(int l, double theta) {
  if (l < 0) throw DomainError("Legendre degree must be non-negative");
  const double x = std::cos(theta);
  const double s = std::sin(theta);
  const auto n = static_cast<std::size_t>(l) + 1;
  LegendreRow row{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};

  // q holds Pbar_{m-1}^{m-1} (times sin^{m-1}) while walking the diagonal.
  double diag = 1.0 / std::sqrt(4.0 * std::numbers::pi);  // Pbar_0^0
  std::vector<double> prev_degree(n, 0.0);                  // Pbar_{l-1}^m / s (or Pbar for m = 0)

  for (int m = 0; m <= l; ++m) {
    // Seed along the diagonal. For m >= 1 we carry Q = Pbar / sin, which obeys the
    // same degree recurrence and stays finite at the poles.
    double start = 0.0;
    if (m == 0) {
      start = diag;
    } else {
      start = -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * diag;
      diag = start * s;
    }
    double lo = 0.0;
    double hi = start;
    for (int k = m + 1; k <= l; ++k) {
      double next = 0.0;
      if (k == m + 1) {
        next = std::sqrt(2.0 * m + 3.0) * x * hi;
      } else {
        const double kk = static_cast<double>(k);
        const double mm = static_cast<double>(m);
        const double a = std::sqrt((4.0 * kk * kk - 1.0) / (kk * kk - mm * mm));
        const double b = std::sqrt(((kk - 1.0) * (kk - 1.0) - mm * mm) / (4.0 * (kk - 1.0) * (kk - 1.0) - 1.0));
        next = a * (x * hi - b * lo);
      }
      lo = hi;
      hi = next;
    }
    const auto mi = static_cast<std::size_t>(m);
    // hi = degree l, lo = degree l-1 (zero when m == l).
    if (m == 0) {
      row.value[mi] = hi;
    } else {
      row.over_sin[mi] = hi;
      row.value[mi] = hi * s;
      prev_degree[mi] = (m == l) ? 0.0 : lo;
    }
  }

  const double ld = static_cast<double>(l);
  for (int m = 1; m <= l; ++m) {
    const auto mi = static_cast<std::size_t>(m);
    const double mm = static_cast<double>(m);
    const double c = std::sqrt((ld * ld - mm * mm) * (2.0 * ld + 1.0) / (2.0 * ld - 1.0));
    row.dtheta[mi] = ld * x * row.over_sin[mi] - c * prev_degree[mi];
  }
  if (l >= 1) row.dtheta[0] = std::sqrt(ld * (ld + 1.0)) * row.value[1];
  return row;
}

}  // namespace nodalab::special
