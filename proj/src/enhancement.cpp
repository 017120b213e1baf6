#include "ovoscope/enhancement.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ovoscope/error.hpp"

namespace ovoscope {

void ClaheConfig::validate() const {
  if (tiles_x < 1 || tiles_y < 1) {
    throw InvalidArgument("clahe: tile grid must be at least 1x1");
  }
  if (!(alpha >= 1.0 && alpha <= 100.0)) {
    throw InvalidArgument("clahe: alpha must lie in [1, 100]");
  }
  if (!(s_max >= 1.0) || !std::isfinite(s_max)) {
    throw InvalidArgument("clahe: s_max must be a finite value >= 1");
  }
}

namespace {

// round(255 * cum / total) with ties up, in exact integer arithmetic.
std::uint8_t scaled_cdf(std::uint64_t cum, std::uint64_t total) {
  return static_cast<std::uint8_t>((510 * cum + total) / (2 * total));
}

}  // namespace

LevelMap he_transfer(const Histogram& hist) {
  if (hist.total == 0) {
    throw DegenerateHistogramError("histogram equalization of an empty histogram");
  }
  LevelMap map{};
  std::uint64_t cum = 0;
  for (int k = 0; k < kGrayLevels; ++k) {
    cum += hist.counts[k];
    map[k] = scaled_cdf(cum, hist.total);
  }
  return map;
}

GrayImage apply_map(const GrayImage& image, const LevelMap& map) {
  GrayImage out(image.width(), image.height());
  auto dst = out.pixels();
  auto src = image.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) {
    dst[i] = map[src[i]];
  }
  return out;
}

GrayImage equalize_hist(const GrayImage& image) {
  return apply_map(image, he_transfer(compute_histogram(image)));
}

double clip_limit(std::uint64_t tile_pixels, int levels, double alpha, double s_max) {
  if (tile_pixels < 1) {
    throw InvalidArgument("clip_limit: tile must contain at least one pixel");
  }
  if (levels != kGrayLevels) {
    throw InvalidArgument("clip_limit: only 256 gray levels are supported");
  }
  if (!(alpha >= 1.0 && alpha <= 100.0)) {
    throw InvalidArgument("clip_limit: alpha must lie in [1, 100]");
  }
  if (!(s_max >= 1.0) || !std::isfinite(s_max)) {
    throw InvalidArgument("clip_limit: s_max must be a finite value >= 1");
  }
  return (static_cast<double>(tile_pixels) / levels) * (1.0 + alpha / 100.0 * (s_max - 1.0));
}

std::uint64_t clip_ceiling(double beta) {
  if (!(beta >= 1.0)) {
    return 1;
  }
  if (beta >= 0x1.0p63) {
    return std::uint64_t{1} << 63;
  }
  return static_cast<std::uint64_t>(std::floor(beta));
}

Histogram clip_and_redistribute(const Histogram& hist, std::uint64_t ceiling) {
  Histogram out = hist;
  std::uint64_t excess = 0;
  for (auto& c : out.counts) {
    if (c > ceiling) {
      excess += c - ceiling;
      c = ceiling;
    }
  }
  // Evenly spaced: the redistributed mass in bins 0..k totals
  // floor((k + 1) * excess / 256).
  std::uint64_t given = 0;
  for (std::uint64_t k = 0; k < kGrayLevels; ++k) {
    const std::uint64_t upto = (k + 1) * excess / kGrayLevels;
    out.counts[k] += upto - given;
    given = upto;
  }
  return out;
}

TileGrid make_tile_grid(std::size_t width, std::size_t height, const ClaheConfig& cfg) {
  cfg.validate();
  const std::size_t nx = std::min(cfg.tiles_x, width);
  const std::size_t ny = std::min(cfg.tiles_y, height);
  TileGrid grid;
  grid.x_edges.resize(nx + 1);
  grid.y_edges.resize(ny + 1);
  for (std::size_t i = 0; i <= nx; ++i) grid.x_edges[i] = i * width / nx;
  for (std::size_t j = 0; j <= ny; ++j) grid.y_edges[j] = j * height / ny;
  return grid;
}

namespace {

std::vector<Histogram> tile_histograms(const GrayImage& image, const TileGrid& grid,
                                       const ClaheConfig& cfg) {
  std::vector<Histogram> hists(grid.tiles_x() * grid.tiles_y());
  for (std::size_t ty = 0; ty < grid.tiles_y(); ++ty) {
    for (std::size_t tx = 0; tx < grid.tiles_x(); ++tx) {
      Histogram h;
      for (std::size_t y = grid.y_edges[ty]; y < grid.y_edges[ty + 1]; ++y) {
        for (std::size_t x = grid.x_edges[tx]; x < grid.x_edges[tx + 1]; ++x) {
          ++h.counts[image.at(x, y)];
        }
      }
      h.total = grid.tile_pixels(tx, ty);
      const double beta = clip_limit(h.total, kGrayLevels, cfg.alpha, cfg.s_max);
      hists[ty * grid.tiles_x() + tx] = clip_and_redistribute(h, clip_ceiling(beta));
    }
  }
  return hists;
}

// For every coordinate along one axis: the two neighbouring tile centres and
// the weight num / den of the second one. Centres sit on half-integers, so
// working in doubled coordinates keeps every weight an exact fraction.
struct AxisBlend {
  std::size_t lo;
  std::size_t hi;
  std::uint64_t num;
  std::uint64_t den;
};

std::vector<AxisBlend> axis_blend(const std::vector<std::size_t>& edges, std::size_t extent) {
  const std::size_t n = edges.size() - 1;
  std::vector<std::uint64_t> centre2(n);  // twice the centre coordinate
  for (std::size_t i = 0; i < n; ++i) {
    centre2[i] = edges[i] + edges[i + 1] - 1;
  }
  std::vector<AxisBlend> out(extent);
  std::size_t t = 0;
  for (std::size_t x = 0; x < extent; ++x) {
    const std::uint64_t pos2 = 2 * static_cast<std::uint64_t>(x);
    if (pos2 <= centre2.front()) {
      out[x] = {0, 0, 0, 1};
    } else if (pos2 >= centre2.back()) {
      out[x] = {n - 1, n - 1, 0, 1};
    } else {
      while (centre2[t + 1] <= pos2) ++t;
      out[x] = {t, t + 1, pos2 - centre2[t], centre2[t + 1] - centre2[t]};
    }
  }
  return out;
}

}  // namespace

std::vector<Histogram> clahe_tile_histograms(const GrayImage& image, const ClaheConfig& cfg) {
  return tile_histograms(image, make_tile_grid(image.width(), image.height(), cfg), cfg);
}

GrayImage clahe(const GrayImage& image, const ClaheConfig& cfg) {
  const TileGrid grid = make_tile_grid(image.width(), image.height(), cfg);
  const std::vector<Histogram> hists = tile_histograms(image, grid, cfg);
  std::vector<LevelMap> maps(hists.size());
  for (std::size_t i = 0; i < hists.size(); ++i) {
    maps[i] = he_transfer(hists[i]);
  }

  const auto bx = axis_blend(grid.x_edges, image.width());
  const auto by = axis_blend(grid.y_edges, image.height());
  const std::size_t nx = grid.tiles_x();

  GrayImage out(image.width(), image.height());
  for (std::size_t y = 0; y < image.height(); ++y) {
    const AxisBlend& row = by[y];
    const LevelMap* top_row = &maps[row.lo * nx];
    const LevelMap* bottom_row = &maps[row.hi * nx];
    for (std::size_t x = 0; x < image.width(); ++x) {
      const AxisBlend& col = bx[x];
      const std::uint8_t v = image.at(x, y);
      // Bilinear blend as an exact fraction sum / (col.den * row.den), rounded half up.
      const std::uint64_t top =
          (col.den - col.num) * top_row[col.lo][v] + col.num * top_row[col.hi][v];
      const std::uint64_t bottom =
          (col.den - col.num) * bottom_row[col.lo][v] + col.num * bottom_row[col.hi][v];
      const std::uint64_t sum = (row.den - row.num) * top + row.num * bottom;
      const std::uint64_t den = col.den * row.den;
      out.at(x, y) = static_cast<std::uint8_t>((2 * sum + den) / (2 * den));
    }
  }
  return out;
}

GrayImage hybrid_clahe_he(const GrayImage& image, const ClaheConfig& cfg) {
  return equalize_hist(clahe(image, cfg));
}

std::string_view to_string(EnhanceMode mode) {
  switch (mode) {
    case EnhanceMode::None:
      return "none";
    case EnhanceMode::He:
      return "he";
    case EnhanceMode::Clahe:
      return "clahe";
    case EnhanceMode::ClaheHe:
      return "clahe-he";
  }
  return "?";
}

EnhanceMode parse_enhance_mode(std::string_view text) {
  for (EnhanceMode m : {EnhanceMode::None, EnhanceMode::He, EnhanceMode::Clahe,
                        EnhanceMode::ClaheHe}) {
    if (text == to_string(m)) {
      return m;
    }
  }
  throw InvalidArgument("unknown enhance mode '" + std::string(text) +
                        "' (expected none|he|clahe|clahe-he)");
}

GrayImage enhance(const GrayImage& image, EnhanceMode mode, const ClaheConfig& cfg) {
  switch (mode) {
    case EnhanceMode::None:
      return image;
    case EnhanceMode::He:
      return equalize_hist(image);
    case EnhanceMode::Clahe:
      return clahe(image, cfg);
    case EnhanceMode::ClaheHe:
      return hybrid_clahe_he(image, cfg);
  }
  return image;
}

}  // namespace ovoscope
