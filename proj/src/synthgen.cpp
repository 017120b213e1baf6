#include "ovoscope/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <vector>

#include "ovoscope/error.hpp"
#include "ovoscope/random.hpp"

namespace ovoscope {
namespace {

// Back-light profile over the normalized ellipse radius u = r^2:
// g(u) = kRim + (kPower + 1)(1 - kRim)(1 - u)^kPower, whose mean over the
// ellipse area is 1, so brightness * g has the requested interior mean. The
// peak is 2.6x the mean: bright eggs blow out to pure white in the core while
// dark eggs still show a small lit spot above the segmentation threshold.
constexpr double kRim = 0.2;
constexpr double kPower = 2.0;

double profile(double u) {
  return kRim + (kPower + 1.0) * (1.0 - kRim) * std::pow(1.0 - u, kPower);
}

// Warm candling tint as per-channel gamma, so white stays white.
constexpr double kGammaR = 0.85;
constexpr double kGammaG = 1.0;
constexpr double kGammaB = 1.3;

constexpr double kEmbryoShade = 0.45;
constexpr double kVesselShade = 0.60;

std::uint8_t tint(double level, double gamma) {
  const double v = 255.0 * std::pow(std::clamp(level, 0.0, 255.0) / 255.0, gamma);
  return static_cast<std::uint8_t>(std::floor(v + 0.5));
}

struct Segment {
  double x0, y0, x1, y1, half_width;
};

double distance_to_segment(double px, double py, const Segment& s) {
  const double dx = s.x1 - s.x0, dy = s.y1 - s.y0;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((px - s.x0) * dx + (py - s.y0) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double ex = px - (s.x0 + t * dx), ey = py - (s.y0 + t * dy);
  return std::sqrt(ex * ex + ey * ey);
}

}  // namespace

SynthConfig SynthConfig::hard(Label label, std::uint64_t seed) {
  SynthConfig cfg;
  cfg.label = label;
  cfg.seed = seed;
  cfg.brightness_fertile = 110.0;
  cfg.brightness_infertile = 95.0;
  cfg.noise_sigma = 30.0;
  return cfg;
}

void SynthConfig::validate() const {
  if (width < 16 || height < 16) {
    throw InvalidArgument("synth: image must be at least 16x16 to hold an egg");
  }
  if (label == Label::Unknown) {
    throw InvalidArgument("synth: class must be fertile or infertile");
  }
  for (double v : {brightness_fertile, brightness_infertile, background}) {
    if (!(v >= 0.0 && v <= 255.0)) {
      throw InvalidArgument("synth: intensities must lie in [0, 255]");
    }
  }
  if (!(brightness_fertile > brightness_infertile)) {
    throw InvalidArgument("synth: fertile brightness must exceed infertile brightness");
  }
  if (!(brightness_infertile > background)) {
    throw InvalidArgument("synth: egg interior must be brighter than the background");
  }
  if (!(embryo_radius_frac > 0.0 && embryo_radius_frac < 1.0)) {
    throw InvalidArgument("synth: embryo_radius_frac must lie in (0, 1)");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw InvalidArgument("synth: noise_sigma must be non-negative");
  }
}

SynthImage generate(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const double w = static_cast<double>(cfg.width);
  const double h = static_cast<double>(cfg.height);

  const double cx = w * rng.uniform(0.47, 0.53);
  const double cy = h * rng.uniform(0.47, 0.53);
  const double ax = std::min(0.36 * w * rng.uniform(0.95, 1.05), std::min(cx, w - cx) - 2.0);
  const double ay = std::min(0.40 * h * rng.uniform(0.95, 1.05), std::min(cy, h - cy) - 2.0);

  const bool fertile = cfg.label == Label::Fertile;
  const double brightness = fertile ? cfg.brightness_fertile : cfg.brightness_infertile;

  // Embryo sits near the centre; vessels radiate from its rim.
  const double minor_axis = 2.0 * std::min(ax, ay);
  const double er = cfg.embryo_radius_frac * minor_axis;
  const double ex = cx + ax * rng.uniform(-0.15, 0.15);
  const double ey = cy + ay * rng.uniform(-0.15, 0.15);
  std::vector<Segment> vessels;
  if (fertile) {
    const int count = 2 + static_cast<int>(rng.below(3));
    for (int k = 0; k < count; ++k) {
      const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
      const double len = std::min(ax, ay) * rng.uniform(0.3, 0.6);
      const double sx = ex + er * std::cos(angle), sy = ey + er * std::sin(angle);
      vessels.push_back({sx, sy, sx + len * std::cos(angle), sy + len * std::sin(angle),
                         rng.uniform(1.0, 1.6)});
    }
  }

  RgbImage img(cfg.width, cfg.height);
  for (std::size_t y = 0; y < cfg.height; ++y) {
    for (std::size_t x = 0; x < cfg.width; ++x) {
      const double px = static_cast<double>(x) + 0.5, py = static_cast<double>(y) + 0.5;
      const double nx = (px - cx) / ax, ny = (py - cy) / ay;
      const double u = nx * nx + ny * ny;
      double level = cfg.background;
      if (u <= 1.0) {
        level = brightness * profile(u);
        if (fertile) {
          const double de = std::hypot(px - ex, py - ey);
          if (de <= er) {
            level *= kEmbryoShade;
          } else {
            for (const auto& s : vessels) {
              if (distance_to_segment(px, py, s) <= s.half_width) {
                level *= kVesselShade;
                break;
              }
            }
          }
        }
      }
      level += cfg.noise_sigma * rng.normal();
      img.set(x, y, {tint(level, kGammaR), tint(level, kGammaG), tint(level, kGammaB)});
    }
  }
  return {std::move(img), cfg.label};
}

DatasetManifest generate_dataset(std::size_t n_fertile, std::size_t n_infertile,
                                 std::uint64_t seed, const std::filesystem::path& out_dir,
                                 bool hard) {
  if (n_fertile < 1 || n_infertile < 1) {
    throw InvalidArgument("synth: need at least one image per class");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  }

  DatasetManifest manifest;
  const std::size_t total = n_fertile + n_infertile;
  for (std::size_t k = 0; k < total; ++k) {
    const bool fertile = k < n_fertile;
    const Label label = fertile ? Label::Fertile : Label::Infertile;
    const std::uint64_t image_seed = seed + k;
    SynthConfig cfg = hard ? SynthConfig::hard(label, image_seed) : SynthConfig{};
    cfg.label = label;
    cfg.seed = image_seed;

    char name[64];
    std::snprintf(name, sizeof name, "%s_%04zu.ppm", fertile ? "fertile" : "infertile",
                  fertile ? k : k - n_fertile);
    const SynthImage s = generate(cfg);
    write_file(out_dir / name, encode_ppm(s.image, true));
    manifest.entries.push_back({name, label});
  }
  save_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

}  // namespace ovoscope
