#include <cstdlib>
#include <string>

#include "simd/kernels_impl.hpp"

namespace ovoscope::simd {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
    case Isa::Neon:
      return "neon";
  }
  return "unknown";
}

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return &detail::scalar_table();
    case Isa::Avx2:
#if defined(OVOSCOPE_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      if (__builtin_cpu_supports("avx2")) {
        return &detail::avx2_table();
      }
#endif
      return nullptr;
    case Isa::Neon:
#if defined(OVOSCOPE_HAVE_NEON)
      // Advanced SIMD is mandatory on AArch64.
      return &detail::neon_table();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

std::vector<Isa> supported_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
    if (table_for(isa) != nullptr) {
      out.push_back(isa);
    }
  }
  return out;
}

namespace {

const KernelTable& select() {
  if (const char* env = std::getenv("OVOSCOPE_ISA")) {
    const std::string want(env);
    for (Isa isa : {Isa::Scalar, Isa::Avx2, Isa::Neon}) {
      if (want == isa_name(isa)) {
        const KernelTable* t = table_for(isa);
        return t != nullptr ? *t : detail::scalar_table();
      }
    }
  }
  const std::vector<Isa> isas = supported_isas();
  return *table_for(isas.back());
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = select();
  return table;
}

}  // namespace ovoscope::simd
