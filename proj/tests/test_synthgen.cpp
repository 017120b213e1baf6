#include <set>

#include "doctest.h"
#include "ovoscope/enhancement.hpp"
#include "ovoscope/error.hpp"
#include "ovoscope/features.hpp"
#include "ovoscope/segmentation.hpp"
#include "ovoscope/synthgen.hpp"
#include "support.hpp"

using namespace ovoscope;

namespace {

SynthConfig config(Label label, std::uint64_t seed, bool hard = false) {
  SynthConfig cfg = hard ? SynthConfig::hard(label, seed) : SynthConfig{};
  cfg.label = label;
  cfg.seed = seed;
  return cfg;
}

FeatureVector crop_features(const SynthConfig& cfg, EnhanceMode mode) {
  const GrayImage gray = to_grayscale(segment_crop(generate(cfg).image));
  return extract_features(enhance(gray, mode, ClaheConfig{}));
}

}  // namespace

TEST_CASE("generation is deterministic and seed sensitive") {
  const SynthImage a = generate(config(Label::Fertile, 7));
  const SynthImage b = generate(config(Label::Fertile, 7));
  const SynthImage c = generate(config(Label::Fertile, 8));
  CHECK(a.image == b.image);
  CHECK_FALSE(a.image == c.image);
  CHECK(a.label == Label::Fertile);
  CHECK(a.image.width() == 200);
  CHECK(a.image.height() == 280);
}

TEST_CASE("fertile eggs are brighter than infertile ones at the same seed") {
  for (std::uint64_t seed : {0u, 1u, 2u, 3u, 42u}) {
    const auto f = to_grayscale(generate(config(Label::Fertile, seed)).image);
    const auto i = to_grayscale(generate(config(Label::Infertile, seed)).image);
    CHECK(extract_features(f).mean > extract_features(i).mean);
  }
}

TEST_CASE("class separation in mean and variance over 100 seeds") {
  for (EnhanceMode mode : {EnhanceMode::None, EnhanceMode::ClaheHe}) {
    CAPTURE(to_string(mode));
    int mean_ok = 0, var_ok = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const FeatureVector f = crop_features(config(Label::Fertile, seed), mode);
      const FeatureVector i = crop_features(config(Label::Infertile, seed), mode);
      mean_ok += f.mean > i.mean;
      var_ok += f.variance > i.variance;
    }
    CHECK(mean_ok == 100);
    CHECK(var_ok == 100);
  }
}

TEST_CASE("every generated egg survives segmentation") {
  for (bool hard : {false, true}) {
    for (Label label : {Label::Fertile, Label::Infertile}) {
      for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const RgbImage img = generate(config(label, seed, hard)).image;
        const RgbImage cropped = segment_crop(img);
        // dim eggs only clear the threshold around the lit core, which is
        // still large enough for an 8x8 tile grid
        CHECK(cropped.width() >= 40);
        CHECK(cropped.height() >= 40);
        CHECK(cropped.width() < img.width());
        CHECK(cropped.height() < img.height());
      }
    }
  }
}

TEST_CASE("hard mode narrows the brightness gap") {
  const SynthConfig easy{}, hard = SynthConfig::hard(Label::Fertile, 1);
  CHECK(hard.brightness_fertile - hard.brightness_infertile <
        easy.brightness_fertile - easy.brightness_infertile);
  CHECK(hard.noise_sigma > easy.noise_sigma);
  CHECK_NOTHROW(hard.validate());
}

TEST_CASE("config validation") {
  auto bad = [](auto mutate) {
    SynthConfig cfg;
    mutate(cfg);
    CHECK_THROWS_AS(generate(cfg), InvalidArgument);
  };
  bad([](SynthConfig& c) { c.width = 8; });
  bad([](SynthConfig& c) { c.label = Label::Unknown; });
  bad([](SynthConfig& c) { c.brightness_fertile = 300; });
  bad([](SynthConfig& c) { c.brightness_infertile = 200; });
  bad([](SynthConfig& c) { c.background = 70; });
  bad([](SynthConfig& c) { c.embryo_radius_frac = 0; });
  bad([](SynthConfig& c) { c.noise_sigma = -1; });
}

TEST_CASE("dataset generation") {
  testing::TempDir dir("synth");
  const DatasetManifest m = generate_dataset(50, 50, 3, dir.path());
  REQUIRE(m.entries.size() == 100);
  std::size_t fertile = 0;
  std::set<std::string> names;
  for (const auto& e : m.entries) {
    fertile += e.label == Label::Fertile;
    names.insert(e.path.filename().string());
    CHECK(std::filesystem::exists(dir.path() / e.path));
  }
  CHECK(fertile == 50);
  CHECK(names.size() == 100);
  CHECK(names.count("fertile_0000.ppm") == 1);
  CHECK(names.count("infertile_0049.ppm") == 1);

  const DatasetManifest loaded = load_manifest(dir / "manifest.json");
  REQUIRE(loaded.entries.size() == 100);
  for (std::size_t k = 0; k < 100; ++k) {
    CHECK(loaded.entries[k].label == m.entries[k].label);
    CHECK(loaded.entries[k].path.filename() == m.entries[k].path.filename());
  }

  // image k uses seed + k
  const auto decoded = std::get<RgbImage>(read_netpbm(dir / "infertile_0000.ppm"));
  CHECK(decoded == generate(config(Label::Infertile, 3 + 50)).image);

  testing::TempDir again("synth");
  generate_dataset(50, 50, 3, again.path());
  for (const auto& name : {"manifest.json", "fertile_0007.ppm", "infertile_0031.ppm"}) {
    CHECK(testing::slurp(dir / name) == testing::slurp(again / name));
  }

  testing::TempDir small("synth");
  CHECK(generate_dataset(1, 1, 0, small.path()).entries.size() == 2);
  CHECK_THROWS_AS(generate_dataset(0, 5, 0, small.path()), InvalidArgument);
}
