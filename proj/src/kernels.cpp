#include "hindsight/kernels.hpp"

#include <cstdlib>
#include <string>

namespace hindsight::kernels {

double dot_scalar(const float* a, const float* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return acc;
}

std::string_view name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "scalar";
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if HINDSIGHT_HAVE_X86 && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::Neon: return HINDSIGHT_HAVE_NEON != 0;
  }
  return false;
}

DotFn dot_for(Isa isa) {
  if (!supported(isa)) return &dot_scalar;
  switch (isa) {
#if HINDSIGHT_HAVE_X86
    case Isa::Avx2: return &dot_avx2;
#endif
#if HINDSIGHT_HAVE_NEON
    case Isa::Neon: return &dot_neon;
#endif
    default: return &dot_scalar;
  }
}

namespace {

Isa resolve_isa() {
  if (const char* env = std::getenv("HINDSIGHT_SIMD")) {
    const std::string want(env);
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
      if (want == name(isa) && supported(isa)) return isa;
    }
  }
  if (supported(Isa::Avx2)) return Isa::Avx2;
  if (supported(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

}  // namespace

Isa active_isa() {
  static const Isa isa = resolve_isa();
  return isa;
}

void dot_rows(Isa isa, std::span<const float> rows, std::size_t dim, std::span<const float> query,
              std::span<double> out) {
  const DotFn dot = dot_for(isa);
  const float* q = query.data();
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = dot(rows.data() + r * dim, q, dim);
}

}  // namespace hindsight::kernels
