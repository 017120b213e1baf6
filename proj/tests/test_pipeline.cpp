#include <algorithm>
#include <set>

#include "doctest.h"
#include "ovoscope/pipeline.hpp"
#include "ovoscope/synthgen.hpp"
#include "support.hpp"

using namespace ovoscope;

namespace {

std::string labels_of(const std::vector<FeatureRow>& rows) {
  std::string s;
  for (const auto& r : rows) s += r.label == Label::Fertile ? 'f' : 'i';
  return s;
}

std::size_t count(const std::vector<FeatureRow>& rows, Label l) {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [&](const FeatureRow& r) { return r.label == l; }));
}

FeatureTable toy_table(std::size_t n_fertile, std::size_t n_infertile) {
  FeatureTable t;
  for (std::size_t k = 0; k < n_fertile + n_infertile; ++k) {
    const double v = static_cast<double>(k);
    t.rows.push_back({"img" + std::to_string(k), {v, v / 3, v * v, -v, 0.1 * v},
                      k < n_fertile ? Label::Fertile : Label::Infertile, std::nullopt});
  }
  return t;
}

}  // namespace

TEST_CASE("preprocess_one") {
  testing::TempDir dir("pre");
  const SynthConfig scfg{};
  const RgbImage img = generate(scfg).image;
  const auto bytes = encode_ppm(img, true);
  write_file(dir / "egg.ppm", bytes);

  PipelineConfig cfg;
  const GrayImage out = preprocess_one(dir / "egg.ppm", cfg);
  CHECK(out.width() <= img.width());
  CHECK(out.height() <= img.height());

  cfg.enhance = EnhanceMode::None;
  CHECK(preprocess_one(dir / "egg.ppm", cfg) == to_grayscale(segment_crop(img)));

  // a gray input skips the colour conversion
  const GrayImage gray = to_grayscale(img);
  write_file(dir / "egg.pgm", encode_pgm(gray, false));
  CHECK(preprocess_one(dir / "egg.pgm", cfg) == segment_crop(gray));

  write_file(dir / "dark.pgm", encode_pgm(GrayImage(30, 30, std::vector<std::uint8_t>(900, 20)),
                                          true));
  try {
    preprocess_one(dir / "dark.pgm", cfg);
    FAIL("expected NoObjectError");
  } catch (const NoObjectError& e) {
    CHECK(std::string(e.what()).find("dark.pgm") != std::string::npos);
  }
  CHECK_THROWS_AS(preprocess_one(dir / "absent.ppm", cfg), IoError);
  const std::string junk = "P6 not an image";
  write_file(dir / "junk.ppm", std::span(reinterpret_cast<const std::uint8_t*>(junk.data()),
                                         junk.size()));
  CHECK_THROWS_AS(preprocess_one(dir / "junk.ppm", cfg), ParseError);
}

TEST_CASE("extract_all") {
  testing::TempDir dir("extract");
  generate_dataset(50, 50, 11, dir.path());
  const DatasetManifest m = load_manifest(dir / "manifest.json");
  PipelineConfig cfg;

  const ExtractResult full = extract_all(m, cfg);
  REQUIRE(full.table.rows.size() == 100);
  CHECK(full.failures.empty());
  for (std::size_t k = 0; k < 100; ++k) {
    CHECK(full.table.rows[k].label == m.entries[k].label);
    CHECK(full.table.rows[k].id == m.entries[k].path.filename().string());
  }
  // each row matches the single-image path
  CHECK(full.table.rows[17].features == extract_features(preprocess_one(m.entries[17].path, cfg)));

  SUBCASE("thread count does not change the result") {
    for (std::size_t threads : {2u, 4u, 7u}) {
      PipelineConfig par = cfg;
      par.threads = threads;
      const ExtractResult r = extract_all(m, par);
      CHECK(table_to_csv(r.table) == table_to_csv(full.table));
    }
  }

  SUBCASE("rows follow manifest order") {
    DatasetManifest perm = m;
    Rng rng(5);
    std::vector<std::size_t> order(100);
    for (std::size_t k = 0; k < 100; ++k) order[k] = k;
    rng.shuffle(order);
    for (std::size_t k = 0; k < 100; ++k) perm.entries[k] = m.entries[order[k]];
    const ExtractResult r = extract_all(perm, cfg);
    REQUIRE(r.table.rows.size() == 100);
    for (std::size_t k = 0; k < 100; ++k) {
      CHECK(r.table.rows[k].id == full.table.rows[order[k]].id);
      CHECK(r.table.rows[k].features == full.table.rows[order[k]].features);
    }
  }

  SUBCASE("failures are collected, not thrown") {
    DatasetManifest ten;
    ten.base_dir = m.base_dir;
    ten.entries.assign(m.entries.begin(), m.entries.begin() + 10);
    const std::string junk = "P5\n4 4\n255\nxx";
    write_file(ten.entries[3].path,
               std::span(reinterpret_cast<const std::uint8_t*>(junk.data()), junk.size()));
    ten.entries.push_back({dir / "missing.ppm", Label::Fertile});
    const ExtractResult r = extract_all(ten, cfg);
    CHECK(r.table.rows.size() == 9);
    REQUIRE(r.failures.size() == 2);
    CHECK(r.failures[0].path == ten.id_of(ten.entries[3]));
    CHECK_FALSE(r.failures[0].io);
    CHECK(r.failures[1].io);
  }
}

TEST_CASE("feature CSV round trip is exact") {
  FeatureTable t = toy_table(3, 2);
  t.rows[0].features.mean = 0.1 + 0.2;
  t.rows[1].features.entropy = 1e-300;
  t.rows[2].features.skewness = -123456.789e10;
  t.rows[3].id = "dir with, comma/\"quoted\".ppm";
  CHECK(table_from_csv(table_to_csv(t)).rows.size() == 5);
  const FeatureTable back = table_from_csv(table_to_csv(t));
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(back.rows[k].id == t.rows[k].id);
    CHECK(back.rows[k].features == t.rows[k].features);
    CHECK(back.rows[k].label == t.rows[k].label);
    CHECK_FALSE(back.rows[k].predicted.has_value());
  }
  t.rows[4].predicted = Label::Fertile;
  const FeatureTable with_pred = table_from_csv(table_to_csv(t));
  CHECK(with_pred.rows[4].predicted == Label::Fertile);
  CHECK(with_pred.rows[0].predicted == Label::Unknown);
  CHECK(table_to_csv(with_pred).find(",predicted\n") != std::string::npos);

  // columns may come in any order
  const FeatureTable shuffled = table_from_csv(
      "label,kurtosis,skewness,variance,entropy,mean,id\nfertile,5,4,3,2,1,a\n");
  CHECK(shuffled.rows[0].features == FeatureVector{1, 2, 3, 4, 5});

  CHECK_THROWS_AS(table_from_csv(""), InvalidArgument);
  CHECK_THROWS_AS(table_from_csv("id,mean\na,1\n"), InvalidArgument);
  CHECK_THROWS_AS(
      table_from_csv("id,mean,entropy,variance,skewness,kurtosis,label\na,1,2,3,x,5,fertile\n"),
      InvalidArgument);
  CHECK_THROWS_AS(
      table_from_csv("id,mean,entropy,variance,skewness,kurtosis,label\na,1,2,3,4,5,maybe\n"),
      InvalidArgument);
  CHECK_THROWS_AS(
      table_from_csv("id,mean,entropy,variance,skewness,kurtosis,label\na,1,2,3,4,fertile\n"),
      InvalidArgument);

  FeatureTable unlabeled = toy_table(1, 1);
  unlabeled.rows[1].label = Label::Unknown;
  CHECK_THROWS_AS(to_samples(unlabeled), InvalidArgument);
  const auto samples = to_samples(toy_table(1, 1));
  CHECK(samples[0].y == 1);
  CHECK(samples[1].y == -1);
  CHECK(samples[1].x == std::vector<double>{1, 1.0 / 3, 1, -1, 0.1});
}

TEST_CASE("train counts") {
  using detail::train_counts;
  CHECK(train_counts(50, 50, 0.5) == std::pair<std::size_t, std::size_t>{25, 25});
  CHECK(train_counts(1, 1, 0.5) == std::pair<std::size_t, std::size_t>{1, 0});
  CHECK(train_counts(3, 3, 0.5) == std::pair<std::size_t, std::size_t>{2, 1});
  CHECK(train_counts(7, 3, 0.7) == std::pair<std::size_t, std::size_t>{5, 2});
  CHECK_THROWS_AS(train_counts(5, 5, 0.0), InvalidArgument);
  CHECK_THROWS_AS(train_counts(5, 5, 1.0), InvalidArgument);

  Rng rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t nf = 1 + rng.below(60), ni = 1 + rng.below(60);
    const double frac = rng.uniform(0.01, 0.99);
    const auto [tf, ti] = train_counts(nf, ni, frac);
    const double n = static_cast<double>(nf + ni);
    CHECK(tf + ti == static_cast<std::size_t>(std::floor(n * frac + 0.5)));
    CHECK(tf <= nf);
    CHECK(ti <= ni);
    // each class stays within one unit of its proportional share
    CHECK(std::abs(static_cast<double>(tf) - nf * frac) < 1.0 + 1e-9);
    CHECK(std::abs(static_cast<double>(ti) - ni * frac) < 1.0 + 1e-9);
  }
}

TEST_CASE("stratified split") {
  const FeatureTable t = toy_table(50, 50);
  const auto s = split(t, 9);
  CHECK(s.train.size() == 50);
  CHECK(s.test.size() == 50);
  CHECK(count(s.train, Label::Fertile) == 25);
  CHECK(count(s.test, Label::Infertile) == 25);

  std::set<std::string> ids;
  for (const auto& r : s.train) ids.insert(r.id);
  for (const auto& r : s.test) ids.insert(r.id);
  CHECK(ids.size() == 100);

  // seeded and shuffled: not the input order, and classes interleave
  const auto again = split(t, 9);
  CHECK(labels_of(again.train) == labels_of(s.train));
  CHECK(again.test.front().id == s.test.front().id);
  CHECK(labels_of(s.test) != std::string(25, 'f') + std::string(25, 'i'));
  CHECK(split(t, 10).train.front().id != s.train.front().id);

  const auto tiny = split(toy_table(1, 1), 1);
  CHECK(tiny.train.size() == 1);
  CHECK(tiny.test.size() == 1);

  FeatureTable one_class = toy_table(4, 0);
  CHECK_THROWS_AS(split(one_class, 1), InvalidArgument);

  DatasetManifest m;
  for (int k = 0; k < 10; ++k) {
    m.entries.push_back({"e" + std::to_string(k), k < 4 ? Label::Fertile : Label::Infertile});
  }
  const auto ms = split(m, 2, 0.5);
  CHECK(ms.train.size() == 5);
  CHECK(std::count_if(ms.train.begin(), ms.train.end(),
                      [](const DatasetEntry& e) { return e.label == Label::Fertile; }) == 2);
}
