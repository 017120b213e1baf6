#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <unistd.h>

#include "ovoscope/random.hpp"
#include "ovoscope/raster.hpp"

namespace testing {

// Scratch directory removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("ovoscope_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline ovoscope::GrayImage random_gray(ovoscope::Rng& rng, std::size_t w, std::size_t h) {
  std::vector<std::uint8_t> px(w * h);
  for (auto& p : px) p = static_cast<std::uint8_t>(rng.below(256));
  return {w, h, std::move(px)};
}

// Pixels drawn from a narrow random band, so histograms have real structure.
inline ovoscope::GrayImage banded_gray(ovoscope::Rng& rng, std::size_t w, std::size_t h) {
  const auto lo = rng.below(200);
  const auto span = 1 + rng.below(56);
  std::vector<std::uint8_t> px(w * h);
  for (auto& p : px) p = static_cast<std::uint8_t>(lo + rng.below(span));
  return {w, h, std::move(px)};
}

inline ovoscope::RgbImage random_rgb(ovoscope::Rng& rng, std::size_t w, std::size_t h) {
  std::vector<std::uint8_t> data(3 * w * h);
  for (auto& v : data) v = static_cast<std::uint8_t>(rng.below(256));
  return {w, h, std::move(data)};
}

inline std::string slurp(const std::filesystem::path& p) {
  const auto bytes = ovoscope::read_file(p);
  return {bytes.begin(), bytes.end()};
}

}  // namespace testing
