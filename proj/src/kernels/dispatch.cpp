#include "licchavi/kernels/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace licchavi::kernels {

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if defined(LICCHAVI_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& table(Isa isa) {
#if defined(LICCHAVI_HAVE_AVX2)
  if (isa == Isa::Avx2 && isa_available(Isa::Avx2)) return avx2::kTable;
#endif
  (void)isa;
  return scalar::kTable;
}

namespace {

Isa select_isa() {
  const char* forced = std::getenv("LICCHAVI_KERNELS");
  if (forced != nullptr && std::strcmp(forced, "scalar") == 0) return Isa::Scalar;
  return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

}  // namespace

Isa active_isa() {
  static const Isa isa = select_isa();
  return isa;
}

const KernelTable& active() {
  static const KernelTable& t = table(active_isa());
  return t;
}

}  // namespace licchavi::kernels
