#pragma once

#include <bectwist/errors.hpp>

#include <cmath>
#include <string>

namespace bectwist {

/// Generalized Laguerre polynomial L_n^l(x) by the three-term recurrence in n.
/// Negative orders -n <= l < 0 use L_n^{-k}(x) = (-x)^k (n-k)!/n! L_{n-k}^k(x).
inline double laguerre_assoc(int n, int l, double x) {
  if (n < 0) throw ValidationError("n", "must be >= 0");
  if (l < -n)
    throw std::domain_error("laguerre_assoc: order l = " + std::to_string(l) + " < -n = " +
                            std::to_string(-n));
  if (l < 0) {
    const int k = -l;
    const double scale = std::exp(std::lgamma(n - k + 1.0) - std::lgamma(n + 1.0));
    return std::pow(-x, k) * scale * laguerre_assoc(n - k, k, x);
  }
  const double a = l;
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 1.0 + a - x;
  for (int k = 1; k < n; ++k) {
    const double next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

}  // namespace bectwist
