#include <arm_neon.h>

#include "simd/kernels_impl.hpp"

namespace ovoscope::simd::detail {
namespace {

inline uint32x4_t weighted_sum(uint16x4_t r, uint16x4_t g, uint16x4_t b) {
  uint32x4_t sum = vmull_n_u16(r, 2989);
  sum = vmlal_n_u16(sum, g, 5870);
  sum = vmlal_n_u16(sum, b, 1141);
  return vaddq_u32(sum, vdupq_n_u32(5000));
}

inline uint16x4_t divide_10000(uint32x4_t sum) {
  // Exact for sum < 2^24; see the AVX2 variant.
  const float32x4_t q = vrndmq_f32(vdivq_f32(vcvtq_f32_u32(sum), vdupq_n_f32(10000.0f)));
  return vmovn_u32(vcvtq_u32_f32(q));
}

void rgb_to_gray_neon(const std::uint8_t* rgb, std::uint8_t* gray, std::size_t pixels) {
  std::size_t i = 0;
  for (; i + 8 <= pixels; i += 8) {
    const uint8x8x3_t px = vld3_u8(rgb + 3 * i);
    const uint16x8_t r = vmovl_u8(px.val[0]);
    const uint16x8_t g = vmovl_u8(px.val[1]);
    const uint16x8_t b = vmovl_u8(px.val[2]);
    const uint16x4_t lo =
        divide_10000(weighted_sum(vget_low_u16(r), vget_low_u16(g), vget_low_u16(b)));
    const uint16x4_t hi =
        divide_10000(weighted_sum(vget_high_u16(r), vget_high_u16(g), vget_high_u16(b)));
    vst1_u8(gray + i, vmovn_u16(vcombine_u16(lo, hi)));
  }
  for (; i < pixels; ++i) {
    gray[i] = gray_of(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]);
  }
}

void threshold_neon(const std::uint8_t* src, std::uint8_t* dst, std::size_t n,
                    std::uint8_t threshold) {
  const uint8x16_t t = vdupq_n_u8(threshold);
  const uint8x16_t one = vdupq_n_u8(1);
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const uint8x16_t ge = vcgeq_u8(vld1q_u8(src + i), t);
    vst1q_u8(dst + i, vandq_u8(ge, one));
  }
  for (; i < n; ++i) {
    dst[i] = src[i] >= threshold ? 1 : 0;
  }
}

// Lanes 0-1 live in `lo`, lanes 2-3 in `hi`, matching the scalar schedule.
inline double combine_lanes(float64x2_t lo, float64x2_t hi) {
  return (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) +
         (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
}

double level_mean_neon(const double* probs) {
  float64x2_t idx_lo = {0.0, 1.0};
  float64x2_t idx_hi = {2.0, 3.0};
  const float64x2_t step = vdupq_n_f64(4.0);
  float64x2_t acc_lo = vdupq_n_f64(0.0);
  float64x2_t acc_hi = vdupq_n_f64(0.0);
  for (std::size_t i = 0; i < kLevels; i += 4) {
    acc_lo = vaddq_f64(acc_lo, vmulq_f64(idx_lo, vld1q_f64(probs + i)));
    acc_hi = vaddq_f64(acc_hi, vmulq_f64(idx_hi, vld1q_f64(probs + i + 2)));
    idx_lo = vaddq_f64(idx_lo, step);
    idx_hi = vaddq_f64(idx_hi, step);
  }
  return combine_lanes(acc_lo, acc_hi);
}

CentralSums central_sums_neon(const double* probs, double mu) {
  float64x2_t idx[2] = {{0.0, 1.0}, {2.0, 3.0}};
  const float64x2_t step = vdupq_n_f64(4.0);
  const float64x2_t m = vdupq_n_f64(mu);
  float64x2_t s2[2] = {vdupq_n_f64(0.0), vdupq_n_f64(0.0)};
  float64x2_t s3[2] = {vdupq_n_f64(0.0), vdupq_n_f64(0.0)};
  float64x2_t s4[2] = {vdupq_n_f64(0.0), vdupq_n_f64(0.0)};
  for (std::size_t i = 0; i < kLevels; i += 4) {
    for (int h = 0; h < 2; ++h) {
      const float64x2_t d = vsubq_f64(idx[h], m);
      const float64x2_t t2 = vmulq_f64(vmulq_f64(d, d), vld1q_f64(probs + i + 2 * h));
      const float64x2_t t3 = vmulq_f64(t2, d);
      const float64x2_t t4 = vmulq_f64(t3, d);
      s2[h] = vaddq_f64(s2[h], t2);
      s3[h] = vaddq_f64(s3[h], t3);
      s4[h] = vaddq_f64(s4[h], t4);
      idx[h] = vaddq_f64(idx[h], step);
    }
  }
  return {combine_lanes(s2[0], s2[1]), combine_lanes(s3[0], s3[1]), combine_lanes(s4[0], s4[1])};
}

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc_lo = vdupq_n_f64(0.0);
  float64x2_t acc_hi = vdupq_n_f64(0.0);
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4) {
    acc_lo = vaddq_f64(acc_lo, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    acc_hi = vaddq_f64(acc_hi, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
  }
  double sum = combine_lanes(acc_lo, acc_hi);
  for (std::size_t i = body; i < n; ++i) {
    sum += a[i] * b[i];
  }
  return sum;
}

}  // namespace

const KernelTable& neon_table() {
  static const KernelTable table{Isa::Neon,       rgb_to_gray_neon,  threshold_neon,
                                 level_mean_neon, central_sums_neon, dot_neon};
  return table;
}

}  // namespace ovoscope::simd::detail
