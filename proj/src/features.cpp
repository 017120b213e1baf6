#include "ovoscope/features.hpp"

#include <cmath>

#include "ovoscope/error.hpp"
#include "ovoscope/simd/kernels.hpp"

namespace ovoscope {
namespace {

void require_spread(double sigma) {
  if (!(sigma > 0.0)) {
    throw DegenerateHistogramError("degenerate histogram: zero variance (constant image)");
  }
}

}  // namespace

double fos_mean(const Pmf& pmf) { return simd::active().level_mean(pmf.probs.data()); }

double fos_entropy(const Pmf& pmf) {
  double h = 0.0;
  for (double p : pmf.probs) {
    if (p > 0.0) {
      h -= p * std::log2(p);
    }
  }
  return h;
}

double fos_variance(const Pmf& pmf, double mu) {
  return simd::active().central_sums(pmf.probs.data(), mu).s2;
}

double fos_skewness(const Pmf& pmf, double mu, double sigma) {
  require_spread(sigma);
  return simd::active().central_sums(pmf.probs.data(), mu).s3 / (sigma * sigma * sigma);
}

double fos_kurtosis(const Pmf& pmf, double mu, double sigma) {
  require_spread(sigma);
  const double s2 = sigma * sigma;
  return simd::active().central_sums(pmf.probs.data(), mu).s4 / (s2 * s2) - 3.0;
}

FeatureVector features_from_histogram(const Histogram& hist) {
  const Pmf pmf = to_pmf(hist);
  FeatureVector f;
  f.mean = fos_mean(pmf);
  f.entropy = fos_entropy(pmf);
  // One pass for all three central sums.
  const simd::CentralSums sums = simd::active().central_sums(pmf.probs.data(), f.mean);
  f.variance = sums.s2;
  const double sigma = std::sqrt(f.variance);
  require_spread(sigma);
  f.skewness = sums.s3 / (sigma * sigma * sigma);
  const double s2 = sigma * sigma;
  f.kurtosis = sums.s4 / (s2 * s2) - 3.0;
  return f;
}

FeatureVector extract_features(const GrayImage& image) {
  return features_from_histogram(compute_histogram(image));
}

}  // namespace ovoscope
