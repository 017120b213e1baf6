#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

namespace ovoscope {

inline constexpr int kGrayLevels = 256;

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

// 8-bit single-channel image, row-major, top-left origin.
class GrayImage {
 public:
  GrayImage(std::size_t width, std::size_t height, std::uint8_t fill = 0);
  GrayImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return pixels_.size(); }

  std::uint8_t at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }
  std::uint8_t& at(std::size_t x, std::size_t y) { return pixels_[y * width_ + x]; }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint8_t> pixels_;
};

// 8-bit interleaved RGB image, row-major, top-left origin.
class RgbImage {
 public:
  RgbImage(std::size_t width, std::size_t height, Rgb fill = {});
  // `data` holds width * height interleaved R, G, B triples.
  RgbImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> data);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return width_ * height_; }

  Rgb at(std::size_t x, std::size_t y) const {
    const std::size_t i = 3 * (y * width_ + x);
    return {data_[i], data_[i + 1], data_[i + 2]};
  }
  void set(std::size_t x, std::size_t y, Rgb c) {
    const std::size_t i = 3 * (y * width_ + x);
    data_[i] = c.r;
    data_[i + 1] = c.g;
    data_[i + 2] = c.b;
  }

  std::span<const std::uint8_t> data() const noexcept { return data_; }
  std::span<std::uint8_t> data() noexcept { return data_; }

  friend bool operator==(const RgbImage&, const RgbImage&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint8_t> data_;
};

using AnyImage = std::variant<GrayImage, RgbImage>;

struct Histogram {
  std::array<std::uint64_t, kGrayLevels> counts{};
  std::uint64_t total = 0;
  friend bool operator==(const Histogram&, const Histogram&) = default;
};

struct Pmf {
  std::array<double, kGrayLevels> probs{};
};

// Netpbm P2/P3/P5/P6 with maxval 255. Throws ParseError.
AnyImage decode_netpbm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pgm(const GrayImage& image, bool binary);
std::vector<std::uint8_t> encode_ppm(const RgbImage& image, bool binary);

// Throws IoError when the file cannot be read, ParseError when it is not valid Netpbm.
AnyImage read_netpbm(const std::filesystem::path& path);
std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

// G' = round(0.2989 R + 0.587 G + 0.1141 B), ties rounded up.
GrayImage to_grayscale(const RgbImage& image);

Histogram compute_histogram(const GrayImage& image);

// Throws DegenerateHistogramError when the histogram is empty.
Pmf to_pmf(const Histogram& hist);

}  // namespace ovoscope
