#pragma once

#include "ovoscope/simd/kernels.hpp"

namespace ovoscope::simd::detail {

const KernelTable& scalar_table();
#if defined(OVOSCOPE_HAVE_AVX2)
const KernelTable& avx2_table();
#endif
#if defined(OVOSCOPE_HAVE_NEON)
const KernelTable& neon_table();
#endif

inline std::uint8_t gray_of(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const std::uint32_t sum = 2989u * r + 5870u * g + 1141u * b + 5000u;
  return static_cast<std::uint8_t>(sum / 10000u);
}

}  // namespace ovoscope::simd::detail
