#pragma once

#include <array>
#include <string_view>

#include "ovoscope/raster.hpp"

namespace ovoscope {

inline constexpr std::size_t kFeatureCount = 5;

// Column order of the feature table.
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {
    "mean", "entropy", "variance", "skewness", "kurtosis"};

// First-order statistics of a gray-level histogram.
struct FeatureVector {
  double mean = 0.0;      // gray levels
  double entropy = 0.0;   // bits
  double variance = 0.0;  // gray levels squared
  double skewness = 0.0;
  double kurtosis = 0.0;  // excess

  std::array<double, kFeatureCount> to_array() const {
    return {mean, entropy, variance, skewness, kurtosis};
  }
  static FeatureVector from_array(const std::array<double, kFeatureCount>& a) {
    return {a[0], a[1], a[2], a[3], a[4]};
  }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

double fos_mean(const Pmf& pmf);
// Base-2 entropy, with 0 log 0 taken as 0.
double fos_entropy(const Pmf& pmf);
double fos_variance(const Pmf& pmf, double mu);
// The standardized moments throw DegenerateHistogramError when sigma is not positive.
double fos_skewness(const Pmf& pmf, double mu, double sigma);
double fos_kurtosis(const Pmf& pmf, double mu, double sigma);

FeatureVector features_from_histogram(const Histogram& hist);

// Throws DegenerateHistogramError for a constant image.
FeatureVector extract_features(const GrayImage& image);

}  // namespace ovoscope
