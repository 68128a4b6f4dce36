#include <cstdlib>
#include <cstring>

#include "robseq/kernels.hpp"

namespace robseq::kernels {
namespace detail {
namespace {

Isa select_isa() {
  const char* env = std::getenv("ROBSEQ_KERNELS");
  if (env != nullptr) {
    if (std::strcmp(env, "scalar") == 0) return Isa::scalar;
#if defined(ROBSEQ_HAVE_AVX2_SOURCES)
    if (std::strcmp(env, "avx2") == 0 && __builtin_cpu_supports("avx2") &&
        __builtin_cpu_supports("fma")) {
      return Isa::avx2;
    }
#endif
    return Isa::scalar;
  }
#if defined(ROBSEQ_HAVE_AVX2_SOURCES)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return Isa::avx2;
  }
#endif
  return Isa::scalar;
}

}  // namespace

const KernelTable& active_table() {
  static const KernelTable& table =
#if defined(ROBSEQ_HAVE_AVX2_SOURCES)
      (select_isa() == Isa::avx2) ? avx2_table() : scalar_table();
#else
      scalar_table();
#endif
  return table;
}

}  // namespace detail

Isa active_isa() {
  static const Isa isa =
      (&detail::active_table() == &detail::scalar_table()) ? Isa::scalar
                                                           : Isa::avx2;
  return isa;
}

const char* isa_name(Isa isa) {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

}  // namespace robseq::kernels
