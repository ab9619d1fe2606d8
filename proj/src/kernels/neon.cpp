#include <arm_neon.h>

#include "lexfa/kernels.hpp"

namespace lexfa::kernels::neon {

std::uint64_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  uint64x2_t acc = vdupq_n_u64(0);
  std::size_t i = 0;
  for (; i + 2 <= words; i += 2) {
    const uint8x16_t bits = vreinterpretq_u8_u64(vandq_u64(vld1q_u64(a + i), vld1q_u64(b + i)));
    acc = vaddq_u64(acc, vpaddlq_u32(vpaddlq_u16(vpaddlq_u8(vcntq_u8(bits)))));
  }
  std::uint64_t total = vgetq_lane_u64(acc, 0) + vgetq_lane_u64(acc, 1);
  for (; i < words; ++i) total += static_cast<std::uint64_t>(__builtin_popcountll(a[i] & b[i]));
  return total;
}

// Lanes {0,1} live in the *_lo registers and {2,3} in *_hi, matching the scalar layout.
PairSums varimax_pair_sums(const double* x, const double* y, std::size_t n) {
  const float64x2_t two = vdupq_n_f64(2.0);
  float64x2_t a_lo = vdupq_n_f64(0), a_hi = a_lo, b_lo = a_lo, b_hi = a_lo;
  float64x2_t c_lo = a_lo, c_hi = a_lo, d_lo = a_lo, d_hi = a_lo;
  auto step = [&](float64x2_t xv, float64x2_t yv, float64x2_t& a, float64x2_t& b, float64x2_t& c,
                  float64x2_t& d) {
    const float64x2_t u = vsubq_f64(vmulq_f64(xv, xv), vmulq_f64(yv, yv));
    const float64x2_t v = vmulq_f64(vmulq_f64(two, xv), yv);
    a = vaddq_f64(a, u);
    b = vaddq_f64(b, v);
    c = vaddq_f64(c, vsubq_f64(vmulq_f64(u, u), vmulq_f64(v, v)));
    d = vaddq_f64(d, vmulq_f64(vmulq_f64(two, u), v));
  };
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    step(vld1q_f64(x + i), vld1q_f64(y + i), a_lo, b_lo, c_lo, d_lo);
    step(vld1q_f64(x + i + 2), vld1q_f64(y + i + 2), a_hi, b_hi, c_hi, d_hi);
  }
  auto combine = [](float64x2_t lo, float64x2_t hi) {
    return (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) + (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
  };
  PairSums s{combine(a_lo, a_hi), combine(b_lo, b_hi), combine(c_lo, c_hi), combine(d_lo, d_hi)};
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
  const float64x2_t vc = vdupq_n_f64(c), vs = vdupq_n_f64(s);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t xv = vld1q_f64(x + i), yv = vld1q_f64(y + i);
    vst1q_f64(x + i, vaddq_f64(vmulq_f64(vc, xv), vmulq_f64(vs, yv)));
    vst1q_f64(y + i, vsubq_f64(vmulq_f64(vc, yv), vmulq_f64(vs, xv)));
  }
  for (; i < n; ++i) {
    const double xv = x[i], yv = y[i];
    x[i] = c * xv + s * yv;
    y[i] = c * yv - s * xv;
  }
}

}  // namespace lexfa::kernels::neon
