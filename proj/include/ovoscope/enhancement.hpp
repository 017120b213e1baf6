#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ovoscope/raster.hpp"

namespace ovoscope {

struct ClaheConfig {
  std::size_t tiles_x = 8;
  std::size_t tiles_y = 8;
  double alpha = 40.0;  // clip factor, 1..100
  double s_max = 4.0;   // maximum slope, >= 1

  // Throws InvalidArgument.
  void validate() const;
};

// Output level for each input level; monotone non-decreasing when built by
// he_transfer.
using LevelMap = std::array<std::uint8_t, kGrayLevels>;

// map[k] = round(255 * cdf(k)), ties rounded up. Throws on an empty histogram.
LevelMap he_transfer(const Histogram& hist);
GrayImage apply_map(const GrayImage& image, const LevelMap& map);
GrayImage equalize_hist(const GrayImage& image);

// beta = (M / N) * (1 + alpha / 100 * (s_max - 1)).
// M: pixels in the tile, N: gray levels (256). Throws InvalidArgument on
// out-of-range parameters.
double clip_limit(std::uint64_t tile_pixels, int levels, double alpha, double s_max);

// Integer bin ceiling applied to a tile histogram: max(1, floor(beta)).
std::uint64_t clip_ceiling(double beta);

// Clips every bin at `ceiling` and spreads the excess evenly over all 256 bins
// in a single pass: every bin receives excess / 256 or one more, with the
// extra counts evenly spaced, so bins 0..k receive floor((k + 1) * excess / 256)
// in total. Total mass is preserved exactly.
Histogram clip_and_redistribute(const Histogram& hist, std::uint64_t ceiling);

// Tile partition of an image. Column edges x_edges[0] = 0 < ... < x_edges[nx] = width,
// tile i covers [x_edges[i], x_edges[i + 1]); rows likewise.
struct TileGrid {
  std::vector<std::size_t> x_edges;
  std::vector<std::size_t> y_edges;

  std::size_t tiles_x() const { return x_edges.size() - 1; }
  std::size_t tiles_y() const { return y_edges.size() - 1; }
  std::uint64_t tile_pixels(std::size_t tx, std::size_t ty) const {
    return static_cast<std::uint64_t>(x_edges[tx + 1] - x_edges[tx]) *
           (y_edges[ty + 1] - y_edges[ty]);
  }
};

// The grid shrinks to min(tiles, dimension) along each axis.
TileGrid make_tile_grid(std::size_t width, std::size_t height, const ClaheConfig& cfg);

// Clipped and redistributed histogram of every tile, row-major over tiles.
std::vector<Histogram> clahe_tile_histograms(const GrayImage& image, const ClaheConfig& cfg);

GrayImage clahe(const GrayImage& image, const ClaheConfig& cfg);

// equalize_hist(clahe(image, cfg))
GrayImage hybrid_clahe_he(const GrayImage& image, const ClaheConfig& cfg);

enum class EnhanceMode { None, He, Clahe, ClaheHe };

std::string_view to_string(EnhanceMode mode);
// Throws InvalidArgument for anything other than none|he|clahe|clahe-he.
EnhanceMode parse_enhance_mode(std::string_view text);

GrayImage enhance(const GrayImage& image, EnhanceMode mode, const ClaheConfig& cfg);

}  // namespace ovoscope
