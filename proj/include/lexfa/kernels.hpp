#pragma once

// Data-parallel inner loops with a scalar reference and SIMD variants.
//
// Every variant produces bit-identical results to the scalar reference: integer kernels
// trivially, floating-point reductions because the scalar code accumulates in the same
// four interleaved lanes and combines them in the same order as the vector code.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace lexfa::kernels {

/// Sums over a column pair used by one planar varimax step, with u = x^2 - y^2 and v = 2xy:
/// a = sum u, b = sum v, c = sum (u^2 - v^2), d = sum 2uv.
struct PairSums {
  double a = 0, b = 0, c = 0, d = 0;
};

enum class Isa { scalar, avx2, neon };

struct KernelTable {
  Isa isa;
  std::uint64_t (*and_popcount)(const std::uint64_t* a, const std::uint64_t* b, std::size_t words);
  PairSums (*varimax_pair_sums)(const double* x, const double* y, std::size_t n);
  /// x <- c*x + s*y, y <- c*y - s*x
  void (*rotate_pair)(double* x, double* y, std::size_t n, double c, double s);
};

std::string_view isa_name(Isa isa);

/// True when the variant is compiled in and the running CPU supports it.
bool supported(Isa isa);

/// Table for a specific variant. Throws ConfigError when unsupported.
const KernelTable& table(Isa isa);

/// Best supported variant, chosen once per process. The environment variable
/// LEXFA_SIMD=scalar|avx2|neon forces a variant.
const KernelTable& active();

std::uint64_t and_popcount(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);
PairSums varimax_pair_sums(std::span<const double> x, std::span<const double> y);
void rotate_pair(std::span<double> x, std::span<double> y, double c, double s);

namespace scalar {
std::uint64_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words);
PairSums varimax_pair_sums(const double* x, const double* y, std::size_t n);
void rotate_pair(double* x, double* y, std::size_t n, double c, double s);
}  // namespace scalar

#if defined(LEXFA_HAVE_AVX2)
namespace avx2 {
std::uint64_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words);
PairSums varimax_pair_sums(const double* x, const double* y, std::size_t n);
void rotate_pair(double* x, double* y, std::size_t n, double c, double s);
}  // namespace avx2
#endif

#if defined(LEXFA_HAVE_NEON)
namespace neon {
std::uint64_t and_popcount(const std::uint64_t* a, const std::uint64_t* b, std::size_t words);
PairSums varimax_pair_sums(const double* x, const double* y, std::size_t n);
void rotate_pair(double* x, double* y, std::size_t n, double c, double s);
}  // namespace neon
#endif

}  // namespace lexfa::kernels
