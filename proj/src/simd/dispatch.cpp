#include <cstdlib>
#include <string_view>

#include "stochtube/simd/kernels.hpp"

namespace stochtube::simd {

std::string_view isa_name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool cpu_has_avx2() {
#if defined(STOCHTUBE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

namespace {

constexpr Kernels kScalar{Isa::Scalar, &scalar::normals, &scalar::em_step, &scalar::nearest};
#if defined(STOCHTUBE_HAVE_AVX2)
constexpr Kernels kAvx2{Isa::Avx2, &avx2::normals, &avx2::em_step, &avx2::nearest};
#endif

const Kernels& pick() {
  if (const char* env = std::getenv("STOCHTUBE_SIMD")) {
    if (std::string_view(env) == "scalar") return kScalar;
  }
  return kernels(Isa::Avx2);
}

}  // namespace

const Kernels& kernels(Isa isa) {
#if defined(STOCHTUBE_HAVE_AVX2)
  if (isa == Isa::Avx2 && cpu_has_avx2()) return kAvx2;
#endif
  (void)isa;
  return kScalar;
}

const Kernels& active() {
  static const Kernels& table = pick();
  return table;
}

}  // namespace stochtube::simd
