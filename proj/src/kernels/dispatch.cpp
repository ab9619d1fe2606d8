#include <algorithm>
#include <cstdlib>
#include <string>

#include "lexfa/error.hpp"
#include "lexfa/kernels.hpp"

namespace lexfa::kernels {

namespace {

constexpr KernelTable kScalar{Isa::scalar, &scalar::and_popcount, &scalar::varimax_pair_sums,
                              &scalar::rotate_pair};
#if defined(LEXFA_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::avx2, &avx2::and_popcount, &avx2::varimax_pair_sums, &avx2::rotate_pair};
#endif
#if defined(LEXFA_HAVE_NEON)
constexpr KernelTable kNeon{Isa::neon, &neon::and_popcount, &neon::varimax_pair_sums, &neon::rotate_pair};
#endif

const KernelTable& select() {
  if (const char* forced = std::getenv("LEXFA_SIMD"); forced != nullptr && *forced != '\0') {
    const std::string name = forced;
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
      if (name == isa_name(isa)) return table(isa);
    throw ConfigError("LEXFA_SIMD: unknown kernel variant '" + name + "'");
  }
  if (supported(Isa::avx2)) return table(Isa::avx2);
  if (supported(Isa::neon)) return table(Isa::neon);
  return kScalar;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(LEXFA_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(LEXFA_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!supported(isa)) throw ConfigError("kernel variant '" + std::string(isa_name(isa)) + "' is not available");
  switch (isa) {
#if defined(LEXFA_HAVE_AVX2)
    case Isa::avx2: return kAvx2;
#endif
#if defined(LEXFA_HAVE_NEON)
    case Isa::neon: return kNeon;
#endif
    default: return kScalar;
  }
}

const KernelTable& active() {
  static const KernelTable& chosen = select();
  return chosen;
}

std::uint64_t and_popcount(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  return active().and_popcount(a.data(), b.data(), std::min(a.size(), b.size()));
}

PairSums varimax_pair_sums(std::span<const double> x, std::span<const double> y) {
  return active().varimax_pair_sums(x.data(), y.data(), std::min(x.size(), y.size()));
}

void rotate_pair(std::span<double> x, std::span<double> y, double c, double s) {
  active().rotate_pair(x.data(), y.data(), std::min(x.size(), y.size()), c, s);
}

}  // namespace lexfa::kernels
