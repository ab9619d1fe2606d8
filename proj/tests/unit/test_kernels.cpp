#include <bit>
#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "lexfa/error.hpp"
#include "lexfa/kernels.hpp"

using namespace lexfa::kernels;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

std::vector<Isa> variants() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::avx2, Isa::neon})
    if (supported(isa)) out.push_back(isa);
  return out;
}

}  // namespace

TEST_CASE("scalar kernels against naive loops") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 64u, 129u}) {
    std::vector<std::uint64_t> a(n), b(n);
    std::uint64_t expect = 0;
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = rng();
      b[i] = rng();
      expect += static_cast<std::uint64_t>(std::popcount(a[i] & b[i]));
    }
    CHECK(scalar::and_popcount(a.data(), b.data(), n) == expect);

    std::vector<double> x(n), y(n);
    double sa = 0, sb = 0, sc = 0, sd = 0;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = g(rng);
      y[i] = g(rng);
      const double u = x[i] * x[i] - y[i] * y[i], v = 2 * x[i] * y[i];
      sa += u;
      sb += v;
      sc += u * u - v * v;
      sd += 2 * u * v;
    }
    const PairSums s = scalar::varimax_pair_sums(x.data(), y.data(), n);
    CHECK(s.a == doctest::Approx(sa).epsilon(1e-12));
    CHECK(s.b == doctest::Approx(sb).epsilon(1e-12));
    CHECK(s.c == doctest::Approx(sc).epsilon(1e-12));
    CHECK(s.d == doctest::Approx(sd).epsilon(1e-12));

    auto rx = x, ry = y;
    scalar::rotate_pair(rx.data(), ry.data(), n, 0.6, 0.8);
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(same_bits(rx[i], 0.6 * x[i] + 0.8 * y[i]));
      CHECK(same_bits(ry[i], 0.6 * y[i] - 0.8 * x[i]));
    }
  }
}

TEST_CASE("SIMD variants are bit-identical to scalar") {
  const KernelTable& ref = table(Isa::scalar);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (Isa isa : variants()) {
    CAPTURE(isa_name(isa));
    const KernelTable& k = table(isa);
    for (int trial = 0; trial < 300; ++trial) {
      const std::size_t n = static_cast<std::size_t>(trial % 37) + (trial > 200 ? 1000 : 0);
      std::vector<std::uint64_t> a(n), b(n);
      for (std::size_t i = 0; i < n; ++i) {
        a[i] = rng();
        b[i] = rng() & rng();
      }
      CHECK(k.and_popcount(a.data(), b.data(), n) == ref.and_popcount(a.data(), b.data(), n));

      std::vector<double> x(n), y(n);
      for (std::size_t i = 0; i < n; ++i) {
        x[i] = g(rng);
        y[i] = g(rng) * 1e-3;
      }
      const PairSums s1 = ref.varimax_pair_sums(x.data(), y.data(), n);
      const PairSums s2 = k.varimax_pair_sums(x.data(), y.data(), n);
      CHECK(same_bits(s1.a, s2.a));
      CHECK(same_bits(s1.b, s2.b));
      CHECK(same_bits(s1.c, s2.c));
      CHECK(same_bits(s1.d, s2.d));

      auto x1 = x, y1 = y, x2 = x, y2 = y;
      const double angle = g(rng);
      ref.rotate_pair(x1.data(), y1.data(), n, std::cos(angle), std::sin(angle));
      k.rotate_pair(x2.data(), y2.data(), n, std::cos(angle), std::sin(angle));
      bool equal = true;
      for (std::size_t i = 0; i < n; ++i) equal = equal && same_bits(x1[i], x2[i]) && same_bits(y1[i], y2[i]);
      CHECK(equal);
    }
  }
}

TEST_CASE("dispatch") {
  CHECK(supported(Isa::scalar));
  CHECK(table(Isa::scalar).isa == Isa::scalar);
  CHECK(supported(active().isa));
  CHECK(isa_name(Isa::avx2) == "avx2");
  for (Isa isa : {Isa::avx2, Isa::neon})
    if (!supported(isa)) CHECK_THROWS_AS(table(isa), lexfa::ConfigError);
}
