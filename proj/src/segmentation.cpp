#include "ovoscope/segmentation.hpp"

#include <algorithm>
#include <string>
#include <tuple>

#include "ovoscope/error.hpp"
#include "ovoscope/simd/kernels.hpp"

namespace ovoscope {

BinaryMask::BinaryMask(std::size_t width, std::size_t height, std::vector<std::uint8_t> bits)
    : width_(width), height_(height), bits_(std::move(bits)) {
  if (width == 0 || height == 0 || bits_.size() != width * height) {
    throw InvalidArgument("mask buffer does not match its dimensions");
  }
  for (auto& b : bits_) {
    b = b != 0 ? 1 : 0;
  }
}

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

BinaryMask binarize(const GrayImage& image, std::uint8_t threshold) {
  std::vector<std::uint8_t> bits(image.size());
  simd::active().threshold(image.pixels().data(), bits.data(), image.size(), threshold);
  return BinaryMask(image.width(), image.height(), std::move(bits));
}

BinaryMask largest_component(const BinaryMask& mask) {
  const std::size_t w = mask.width();
  const std::size_t h = mask.height();
  const auto bits = mask.bits();
  // label 0 = background / unvisited
  std::vector<std::uint32_t> label(bits.size(), 0);
  std::vector<std::size_t> stack;

  std::uint32_t best_label = 0;
  std::size_t best_size = 0;
  std::tuple<std::size_t, std::size_t> best_corner{};
  std::uint32_t next = 0;

  for (std::size_t start = 0; start < bits.size(); ++start) {
    if (bits[start] == 0 || label[start] != 0) {
      continue;
    }
    const std::uint32_t id = ++next;
    std::size_t size = 0;
    std::size_t top = h, left = w;
    label[start] = id;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t p = stack.back();
      stack.pop_back();
      ++size;
      const std::size_t x = p % w;
      const std::size_t y = p / w;
      top = std::min(top, y);
      left = std::min(left, x);
      auto visit = [&](std::size_t q) {
        if (bits[q] != 0 && label[q] == 0) {
          label[q] = id;
          stack.push_back(q);
        }
      };
      if (x > 0) visit(p - 1);
      if (x + 1 < w) visit(p + 1);
      if (y > 0) visit(p - w);
      if (y + 1 < h) visit(p + w);
    }
    const std::tuple<std::size_t, std::size_t> corner{top, left};
    if (size > best_size || (size == best_size && corner < best_corner)) {
      best_size = size;
      best_label = id;
      best_corner = corner;
    }
  }
  if (best_label == 0) {
    throw NoObjectError();
  }

  std::vector<std::uint8_t> out(bits.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = label[i] == best_label ? 1 : 0;
  }
  return BinaryMask(w, h, std::move(out));
}

CropRect bounding_box(const BinaryMask& mask) {
  CropRect r{mask.height(), mask.width(), 0, 0};
  bool any = false;
  for (std::size_t y = 0; y < mask.height(); ++y) {
    for (std::size_t x = 0; x < mask.width(); ++x) {
      if (mask.at(x, y)) {
        any = true;
        r.top = std::min(r.top, y);
        r.bottom = std::max(r.bottom, y);
        r.left = std::min(r.left, x);
        r.right = std::max(r.right, x);
      }
    }
  }
  if (!any) {
    throw NoObjectError();
  }
  return r;
}

namespace {

void check_rect(const CropRect& rect, std::size_t width, std::size_t height) {
  if (rect.top > rect.bottom || rect.left > rect.right || rect.bottom >= height ||
      rect.right >= width) {
    throw InvalidArgument("crop rect (" + std::to_string(rect.top) + "," +
                          std::to_string(rect.left) + "," + std::to_string(rect.bottom) + "," +
                          std::to_string(rect.right) + ") outside " + std::to_string(width) +
                          "x" + std::to_string(height) + " image");
  }
}

}  // namespace

GrayImage crop(const GrayImage& image, const CropRect& rect) {
  check_rect(rect, image.width(), image.height());
  GrayImage out(rect.width(), rect.height());
  for (std::size_t y = 0; y < rect.height(); ++y) {
    const auto src = image.pixels().subspan((rect.top + y) * image.width() + rect.left,
                                            rect.width());
    std::copy(src.begin(), src.end(), out.pixels().begin() + y * rect.width());
  }
  return out;
}

RgbImage crop(const RgbImage& image, const CropRect& rect) {
  check_rect(rect, image.width(), image.height());
  RgbImage out(rect.width(), rect.height());
  const std::size_t row_bytes = 3 * rect.width();
  for (std::size_t y = 0; y < rect.height(); ++y) {
    const auto src =
        image.data().subspan(3 * ((rect.top + y) * image.width() + rect.left), row_bytes);
    std::copy(src.begin(), src.end(), out.data().begin() + y * row_bytes);
  }
  return out;
}

RgbImage segment_crop(const RgbImage& image, std::uint8_t threshold) {
  const BinaryMask mask = largest_component(binarize(to_grayscale(image), threshold));
  return crop(image, bounding_box(mask));
}

GrayImage segment_crop(const GrayImage& image, std::uint8_t threshold) {
  const BinaryMask mask = largest_component(binarize(image, threshold));
  return crop(image, bounding_box(mask));
}

}  // namespace ovoscope
