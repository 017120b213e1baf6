#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

// Data-parallel inner loops used by the imaging and classifier modules.
//
// Every kernel has a scalar reference and, where the build target allows,
// AVX2 (x86-64) or NEON (AArch64) variants. The vector variants produce
// results bit-identical to the scalar reference: integer kernels trivially,
// floating-point reductions because the scalar code accumulates in the same
// four interleaved lanes and combines them in the same order.
namespace ovoscope::simd {

enum class Isa { Scalar, Avx2, Neon };

std::string_view isa_name(Isa isa);

// Central moment sums over a 256-bin pmf: sum of (n - mu)^k * p[n] for k = 2, 3, 4.
struct CentralSums {
  double s2 = 0.0;
  double s3 = 0.0;
  double s4 = 0.0;
};

inline constexpr std::size_t kLevels = 256;

struct KernelTable {
  Isa isa;
  // gray[i] = (2989 R + 5870 G + 1141 B + 5000) / 10000, i.e. the 4-decimal
  // luma weights with round-half-up, computed exactly.
  void (*rgb_to_gray)(const std::uint8_t* rgb, std::uint8_t* gray, std::size_t pixels);
  // dst[i] = src[i] >= threshold ? 1 : 0
  void (*threshold)(const std::uint8_t* src, std::uint8_t* dst, std::size_t n,
                    std::uint8_t threshold);
  // sum of n * probs[n] over the 256 levels
  double (*level_mean)(const double* probs);
  CentralSums (*central_sums)(const double* probs, double mu);
  double (*dot)(const double* a, const double* b, std::size_t n);
};

// Kernels for the best ISA on this machine. OVOSCOPE_ISA=scalar|avx2|neon in
// the environment overrides the choice (an unsupported request falls back to scalar).
const KernelTable& active();

// nullptr when the ISA is not compiled in or not supported by this CPU.
const KernelTable* table_for(Isa isa);

std::vector<Isa> supported_isas();

}  // namespace ovoscope::simd
