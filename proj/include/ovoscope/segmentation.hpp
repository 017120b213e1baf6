#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ovoscope/raster.hpp"

namespace ovoscope {

inline constexpr std::uint8_t kDefaultThreshold = 125;

// 1 = object, 0 = background.
class BinaryMask {
 public:
  BinaryMask(std::size_t width, std::size_t height, std::vector<std::uint8_t> bits);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  bool at(std::size_t x, std::size_t y) const { return bits_[y * width_ + x] != 0; }
  std::span<const std::uint8_t> bits() const noexcept { return bits_; }
  std::size_t count() const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint8_t> bits_;
};

// Inclusive pixel rectangle.
struct CropRect {
  std::size_t top = 0;
  std::size_t left = 0;
  std::size_t bottom = 0;
  std::size_t right = 0;

  std::size_t width() const { return right - left + 1; }
  std::size_t height() const { return bottom - top + 1; }
  friend bool operator==(const CropRect&, const CropRect&) = default;
};

// bit = pixel >= threshold
BinaryMask binarize(const GrayImage& image, std::uint8_t threshold = kDefaultThreshold);

// Keeps only the largest 4-connected component. Equal sizes are resolved in
// favour of the component whose bounding box has the smaller (top, left).
// Throws NoObjectError on an empty mask.
BinaryMask largest_component(const BinaryMask& mask);

// Tightest rectangle around the set bits. Throws NoObjectError on an empty mask.
CropRect bounding_box(const BinaryMask& mask);

// Throws InvalidArgument if the rectangle is inverted or leaves the image.
GrayImage crop(const GrayImage& image, const CropRect& rect);
RgbImage crop(const RgbImage& image, const CropRect& rect);

// grayscale -> binarize -> largest component -> bounding box -> crop of the original.
RgbImage segment_crop(const RgbImage& image, std::uint8_t threshold = kDefaultThreshold);
GrayImage segment_crop(const GrayImage& image, std::uint8_t threshold = kDefaultThreshold);

}  // namespace ovoscope
