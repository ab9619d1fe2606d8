// Compiled with -mavx2 only; callers reach these through the dispatch table after a CPU check.
#include <immintrin.h>

#include "lexfa/kernels.hpp"

namespace lexfa::kernels::avx2 {

namespace {

// Per-byte popcount through a nibble lookup, summed into four 64-bit lanes.
inline __m256i popcount_bytes(__m256i v) {
  const __m256i lookup = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                          0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low_mask = _mm256_set1_epi8(0x0f);
  const __m256i lo = _mm256_and_si256(v, low_mask);
  const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
  return _mm256_add_epi8(_mm256_shuffle_epi8(lookup, lo), _mm256_shuffle_epi8(lookup, hi));
}

inline double lane_sum(__m256d v) {
  alignas(32) double l[4];
  _mm256_store_pd(l, v);
  return (l[0] + l[1]) + (l[2] + l[3]);
}

}  // namespace

std::uint64_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= words; i += 4) {
    const __m256i va = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i));
    const __m256i vb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i));
    const __m256i counts = popcount_bytes(_mm256_and_si256(va, vb));
    acc = _mm256_add_epi64(acc, _mm256_sad_epu8(counts, _mm256_setzero_si256()));
  }
  alignas(32) std::uint64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
  std::uint64_t total = lanes[0] + lanes[1] + lanes[2] + lanes[3];
  for (; i < words; ++i) total += static_cast<std::uint64_t>(__builtin_popcountll(a[i] & b[i]));
  return total;
}

PairSums varimax_pair_sums(const double* x, const double* y, std::size_t n) {
  const __m256d two = _mm256_set1_pd(2.0);
  __m256d a = _mm256_setzero_pd(), b = _mm256_setzero_pd();
  __m256d c = _mm256_setzero_pd(), d = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d yv = _mm256_loadu_pd(y + i);
    const __m256d u = _mm256_sub_pd(_mm256_mul_pd(xv, xv), _mm256_mul_pd(yv, yv));
    const __m256d v = _mm256_mul_pd(_mm256_mul_pd(two, xv), yv);
    a = _mm256_add_pd(a, u);
    b = _mm256_add_pd(b, v);
    c = _mm256_add_pd(c, _mm256_sub_pd(_mm256_mul_pd(u, u), _mm256_mul_pd(v, v)));
    d = _mm256_add_pd(d, _mm256_mul_pd(_mm256_mul_pd(two, u), v));
  }
  PairSums s{lane_sum(a), lane_sum(b), lane_sum(c), lane_sum(d)};
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
  const __m256d vc = _mm256_set1_pd(c), vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d xv = _mm256_loadu_pd(x + i);
    const __m256d yv = _mm256_loadu_pd(y + i);
    _mm256_storeu_pd(x + i, _mm256_add_pd(_mm256_mul_pd(vc, xv), _mm256_mul_pd(vs, yv)));
    _mm256_storeu_pd(y + i, _mm256_sub_pd(_mm256_mul_pd(vc, yv), _mm256_mul_pd(vs, xv)));
  }
  for (; i < n; ++i) {
    const double xv = x[i], yv = y[i];
    x[i] = c * xv + s * yv;
    y[i] = c * yv - s * xv;
  }
}

}  // namespace lexfa::kernels::avx2
