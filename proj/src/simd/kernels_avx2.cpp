#include <immintrin.h>

#include "simd/kernels_impl.hpp"

namespace ovoscope::simd::detail {
namespace {

void rgb_to_gray_avx2(const std::uint8_t* rgb, std::uint8_t* gray, std::size_t pixels) {
  // Within each 128-bit lane, spread one channel of four packed RGB pixels
  // into 32-bit slots.
  const __m256i pick_r = _mm256_setr_epi8(0, -1, -1, -1, 3, -1, -1, -1, 6, -1, -1, -1, 9, -1, -1,
                                          -1, 0, -1, -1, -1, 3, -1, -1, -1, 6, -1, -1, -1, 9, -1,
                                          -1, -1);
  const __m256i pick_g = _mm256_setr_epi8(1, -1, -1, -1, 4, -1, -1, -1, 7, -1, -1, -1, 10, -1, -1,
                                          -1, 1, -1, -1, -1, 4, -1, -1, -1, 7, -1, -1, -1, 10, -1,
                                          -1, -1);
  const __m256i pick_b = _mm256_setr_epi8(2, -1, -1, -1, 5, -1, -1, -1, 8, -1, -1, -1, 11, -1, -1,
                                          -1, 2, -1, -1, -1, 5, -1, -1, -1, 8, -1, -1, -1, 11, -1,
                                          -1, -1);
  const __m256i wr = _mm256_set1_epi32(2989);
  const __m256i wg = _mm256_set1_epi32(5870);
  const __m256i wb = _mm256_set1_epi32(1141);
  const __m256i half = _mm256_set1_epi32(5000);
  const __m256 denom = _mm256_set1_ps(10000.0f);
  const __m256i gather_low = _mm256_setr_epi32(0, 4, 0, 0, 0, 0, 0, 0);

  std::size_t i = 0;
  // Each iteration reads 16 bytes at offsets 3i and 3i + 12.
  for (; i + 10 <= pixels; i += 8) {
    const __m128i lo = _mm_loadu_si128(reinterpret_cast<const __m128i*>(rgb + 3 * i));
    const __m128i hi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(rgb + 3 * i + 12));
    const __m256i v = _mm256_set_m128i(hi, lo);
    const __m256i r = _mm256_shuffle_epi8(v, pick_r);
    const __m256i g = _mm256_shuffle_epi8(v, pick_g);
    const __m256i b = _mm256_shuffle_epi8(v, pick_b);
    __m256i sum = _mm256_add_epi32(_mm256_mullo_epi32(r, wr), _mm256_mullo_epi32(g, wg));
    sum = _mm256_add_epi32(sum, _mm256_mullo_epi32(b, wb));
    sum = _mm256_add_epi32(sum, half);
    // sum < 2^24 is exact in float, and a correctly rounded quotient never
    // crosses an integer for a divisor of 10000 in this range.
    const __m256 q = _mm256_floor_ps(_mm256_div_ps(_mm256_cvtepi32_ps(sum), denom));
    const __m256i qi = _mm256_cvttps_epi32(q);
    __m256i packed = _mm256_packus_epi32(qi, qi);
    packed = _mm256_packus_epi16(packed, packed);
    packed = _mm256_permutevar8x32_epi32(packed, gather_low);
    _mm_storel_epi64(reinterpret_cast<__m128i*>(gray + i), _mm256_castsi256_si128(packed));
  }
  for (; i < pixels; ++i) {
    gray[i] = gray_of(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]);
  }
}

void threshold_avx2(const std::uint8_t* src, std::uint8_t* dst, std::size_t n,
                    std::uint8_t threshold) {
  const __m256i t = _mm256_set1_epi8(static_cast<char>(threshold));
  const __m256i one = _mm256_set1_epi8(1);
  std::size_t i = 0;
  for (; i + 32 <= n; i += 32) {
    const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(src + i));
    const __m256i ge = _mm256_cmpeq_epi8(_mm256_max_epu8(x, t), x);
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(dst + i), _mm256_and_si256(ge, one));
  }
  for (; i < n; ++i) {
    dst[i] = src[i] >= threshold ? 1 : 0;
  }
}

inline double combine_lanes(__m256d v) {
  alignas(32) double lane[4];
  _mm256_store_pd(lane, v);
  return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

double level_mean_avx2(const double* probs) {
  __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  const __m256d step = _mm256_set1_pd(4.0);
  __m256d acc = _mm256_setzero_pd();
  for (std::size_t i = 0; i < kLevels; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(idx, _mm256_loadu_pd(probs + i)));
    idx = _mm256_add_pd(idx, step);
  }
  return combine_lanes(acc);
}

CentralSums central_sums_avx2(const double* probs, double mu) {
  __m256d idx = _mm256_setr_pd(0.0, 1.0, 2.0, 3.0);
  const __m256d step = _mm256_set1_pd(4.0);
  const __m256d m = _mm256_set1_pd(mu);
  __m256d s2 = _mm256_setzero_pd();
  __m256d s3 = _mm256_setzero_pd();
  __m256d s4 = _mm256_setzero_pd();
  for (std::size_t i = 0; i < kLevels; i += 4) {
    const __m256d d = _mm256_sub_pd(idx, m);
    const __m256d t2 = _mm256_mul_pd(_mm256_mul_pd(d, d), _mm256_loadu_pd(probs + i));
    const __m256d t3 = _mm256_mul_pd(t2, d);
    const __m256d t4 = _mm256_mul_pd(t3, d);
    s2 = _mm256_add_pd(s2, t2);
    s3 = _mm256_add_pd(s3, t3);
    s4 = _mm256_add_pd(s4, t4);
    idx = _mm256_add_pd(idx, step);
  }
  return {combine_lanes(s2), combine_lanes(s3), combine_lanes(s4)};
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  double sum = combine_lanes(acc);
  for (std::size_t i = body; i < n; ++i) {
    sum += a[i] * b[i];
  }
  return sum;
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{Isa::Avx2,        rgb_to_gray_avx2,  threshold_avx2,
                                 level_mean_avx2,  central_sums_avx2, dot_avx2};
  return table;
}

}  // namespace ovoscope::simd::detail
