#include "lexfa/kernels.hpp"

#include <bit>

namespace lexfa::kernels::scalar {

std::uint64_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < words; ++i) total += static_cast<std::uint64_t>(std::popcount(a[i] & b[i]));
  return total;
}

// Four interleaved accumulators, combined as (l0 + l1) + (l2 + l3), then the tail in order.
// The SIMD variants reproduce exactly this summation order.
PairSums varimax_pair_sums(const double* x, const double* y, std::size_t n) {
  double a[4] = {0, 0, 0, 0}, b[4] = {0, 0, 0, 0}, c[4] = {0, 0, 0, 0}, d[4] = {0, 0, 0, 0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) {
      const double xv = x[i + l], yv = y[i + l];
      const double u = xv * xv - yv * yv;
      const double v = (2.0 * xv) * yv;
      a[l] += u;
      b[l] += v;
      c[l] += u * u - v * v;
      d[l] += (2.0 * u) * v;
    }
  }
  PairSums s{(a[0] + a[1]) + (a[2] + a[3]), (b[0] + b[1]) + (b[2] + b[3]),
             (c[0] + c[1]) + (c[2] + c[3]), (d[0] + d[1]) + (d[2] + d[3])};
  for (; i < n; ++i) {
    const double xv = x[i], yv = y[i];
    const double u = xv * xv - yv * yv;
    const double v = (2.0 * xv) * yv;
    s.a += u;
    s.b += v;
    s.c += u * u - v * v;
    s.d += (2.0 * u) * v;
  }
  return s;
}

void rotate_pair(double* x, double* y, std::size_t n, double c, double s) {
  for (std::size_t i = 0; i < n; ++i) {
    const double xv = x[i], yv = y[i];
    x[i] = c * xv + s * yv;
    y[i] = c * yv - s * xv;
  }
}

}  // namespace lexfa::kernels::scalar
