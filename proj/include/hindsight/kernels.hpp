#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Dot-product kernels for the similarity scan. Every variant reads float32
// inputs and accumulates in double; the scalar kernel is the reference the
// SIMD variants are tested against.

#if defined(__x86_64__) || defined(_M_X64)
#define HINDSIGHT_HAVE_X86 1
#else
#define HINDSIGHT_HAVE_X86 0
#endif

#if defined(__aarch64__) || defined(_M_ARM64)
#define HINDSIGHT_HAVE_NEON 1
#else
#define HINDSIGHT_HAVE_NEON 0
#endif

namespace hindsight::kernels {

enum class Isa { Scalar, Avx2, Neon };

using DotFn = double (*)(const float* a, const float* b, std::size_t n);

double dot_scalar(const float* a, const float* b, std::size_t n);
#if HINDSIGHT_HAVE_X86
double dot_avx2(const float* a, const float* b, std::size_t n);
#endif
#if HINDSIGHT_HAVE_NEON
double dot_neon(const float* a, const float* b, std::size_t n);
#endif

std::string_view name(Isa isa);

/// True when the variant is compiled in and the running CPU supports it.
bool supported(Isa isa);

/// Kernel for `isa`; falls back to scalar when unsupported.
DotFn dot_for(Isa isa);

/// Best supported variant, chosen once per process. The HINDSIGHT_SIMD
/// environment variable ("scalar", "avx2", "neon") overrides the choice.
Isa active_isa();

/// out[r] = <query, rows[r]> for a row-major block of `out.size()` rows.
void dot_rows(Isa isa, std::span<const float> rows, std::size_t dim, std::span<const float> query,
              std::span<double> out);

}  // namespace hindsight::kernels
