#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

#include "ovoscope/dataset.hpp"
#include "ovoscope/eval.hpp"
#include "ovoscope/raster.hpp"

namespace ovoscope {

// Parameters of a synthetic candling photograph: a bright elliptical egg on a
// dark background, lit from behind. Fertile eggs carry a dark embryo disc with
// a few vessel strokes. Intensities are luma values before tinting.
struct SynthConfig {
  std::size_t width = 200;
  std::size_t height = 280;
  Label label = Label::Fertile;
  std::uint64_t seed = 0;
  double brightness_fertile = 180.0;   // mean interior intensity
  double brightness_infertile = 60.0;
  double embryo_radius_frac = 0.15;    // of the egg's minor axis, fertile only
  double noise_sigma = 8.0;
  double background = 10.0;

  // Smaller brightness gap and heavy noise, so the classes overlap.
  static SynthConfig hard(Label label, std::uint64_t seed);

  // Throws InvalidArgument.
  void validate() const;
};

struct SynthImage {
  RgbImage image;
  Label label;
};

// Deterministic for a fixed config; uses only the Rng in random.hpp.
SynthImage generate(const SynthConfig& cfg);

// Writes fertile_NNNN.ppm and infertile_NNNN.ppm (P6) plus manifest.json into
// out_dir. Image k (fertile first, then infertile) uses seed + k. Returns the
// manifest with paths relative to out_dir.
DatasetManifest generate_dataset(std::size_t n_fertile, std::size_t n_infertile,
                                 std::uint64_t seed, const std::filesystem::path& out_dir,
                                 bool hard = false);

}  // namespace ovoscope
