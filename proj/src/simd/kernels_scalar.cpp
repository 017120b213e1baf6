#include "simd/kernels_impl.hpp"

namespace ovoscope::simd::detail {
namespace {

void rgb_to_gray_scalar(const std::uint8_t* rgb, std::uint8_t* gray, std::size_t pixels) {
  for (std::size_t i = 0; i < pixels; ++i) {
    gray[i] = gray_of(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]);
  }
}

void threshold_scalar(const std::uint8_t* src, std::uint8_t* dst, std::size_t n,
                      std::uint8_t threshold) {
  for (std::size_t i = 0; i < n; ++i) {
    dst[i] = src[i] >= threshold ? 1 : 0;
  }
}

// The reductions below keep four partial sums, lane l taking the elements
// i with i % 4 == l, and combine them as (l0 + l1) + (l2 + l3). The vector
// kernels follow the same schedule.

double level_mean_scalar(const double* probs) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < kLevels; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) {
      acc[l] += static_cast<double>(i + l) * probs[i + l];
    }
  }
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

CentralSums central_sums_scalar(const double* probs, double mu) {
  double s2[4] = {0.0, 0.0, 0.0, 0.0};
  double s3[4] = {0.0, 0.0, 0.0, 0.0};
  double s4[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < kLevels; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) {
      const double d = static_cast<double>(i + l) - mu;
      const double t2 = (d * d) * probs[i + l];
      const double t3 = t2 * d;
      const double t4 = t3 * d;
      s2[l] += t2;
      s3[l] += t3;
      s4[l] += t4;
    }
  }
  return {(s2[0] + s2[1]) + (s2[2] + s2[3]), (s3[0] + s3[1]) + (s3[2] + s3[3]),
          (s4[0] + s4[1]) + (s4[2] + s4[3])};
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t body = n - n % 4;
  for (std::size_t i = 0; i < body; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) {
      acc[l] += a[i + l] * b[i + l];
    }
  }
  double sum = (acc[0] + acc[1]) + (acc[2] + acc[3]);
  for (std::size_t i = body; i < n; ++i) {
    sum += a[i] * b[i];
  }
  return sum;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::Scalar,         rgb_to_gray_scalar,  threshold_scalar,
                                 level_mean_scalar,   central_sums_scalar, dot_scalar};
  return table;
}

}  // namespace ovoscope::simd::detail
