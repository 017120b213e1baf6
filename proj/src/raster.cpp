#include "ovoscope/raster.hpp"

#include <fstream>
#include <iterator>
#include <string>

#include "ovoscope/error.hpp"
#include "ovoscope/simd/kernels.hpp"

namespace ovoscope {
namespace {

void check_dims(std::size_t width, std::size_t height) {
  if (width == 0 || height == 0) {
    throw InvalidArgument("image dimensions must be at least 1x1");
  }
}

}  // namespace

GrayImage::GrayImage(std::size_t width, std::size_t height, std::uint8_t fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  pixels_.assign(width * height, fill);
}

GrayImage::GrayImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dims(width, height);
  if (pixels_.size() != width * height) {
    throw InvalidArgument("gray pixel buffer does not match " + std::to_string(width) + "x" +
                          std::to_string(height));
  }
}

RgbImage::RgbImage(std::size_t width, std::size_t height, Rgb fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  data_.resize(3 * width * height);
  for (std::size_t i = 0; i < width * height; ++i) {
    data_[3 * i] = fill.r;
    data_[3 * i + 1] = fill.g;
    data_[3 * i + 2] = fill.b;
  }
}

RgbImage::RgbImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  check_dims(width, height);
  if (data_.size() != 3 * width * height) {
    throw InvalidArgument("rgb pixel buffer does not match " + std::to_string(width) + "x" +
                          std::to_string(height));
  }
}

GrayImage to_grayscale(const RgbImage& image) {
  GrayImage out(image.width(), image.height());
  simd::active().rgb_to_gray(image.data().data(), out.pixels().data(), image.pixel_count());
  return out;
}

Histogram compute_histogram(const GrayImage& image) {
  Histogram h;
  for (std::uint8_t v : image.pixels()) {
    ++h.counts[v];
  }
  h.total = image.size();
  return h;
}

Pmf to_pmf(const Histogram& hist) {
  if (hist.total == 0) {
    throw DegenerateHistogramError("empty histogram");
  }
  Pmf p;
  const double total = static_cast<double>(hist.total);
  for (int i = 0; i < kGrayLevels; ++i) {
    p.probs[i] = static_cast<double>(hist.counts[i]) / total;
  }
  return p;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw IoError("read failed: " + path.string());
  }
  return bytes;
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw IoError("write failed: " + path.string());
  }
}

AnyImage read_netpbm(const std::filesystem::path& path) {
  const std::vector<std::uint8_t> bytes = read_file(path);
  return decode_netpbm(bytes);
}

}  // namespace ovoscope
