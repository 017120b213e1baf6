#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ovoscope/dataset.hpp"
#include "ovoscope/enhancement.hpp"
#include "ovoscope/error.hpp"
#include "ovoscope/eval.hpp"
#include "ovoscope/features.hpp"
#include "ovoscope/random.hpp"
#include "ovoscope/segmentation.hpp"
#include "ovoscope/svm.hpp"

namespace ovoscope {

struct PipelineConfig {
  std::uint8_t threshold = kDefaultThreshold;
  ClaheConfig clahe;
  EnhanceMode enhance = EnhanceMode::ClaheHe;
  TrainConfig svm;
  double train_fraction = 0.5;
  std::uint64_t split_seed = 1;
  std::size_t threads = 1;
};

// decode -> segment_crop -> grayscale -> enhancement. Errors keep their type
// and carry the offending path in the message.
GrayImage preprocess_one(const std::filesystem::path& path, const PipelineConfig& cfg);

struct FeatureRow {
  std::string id;
  FeatureVector features;
  Label label = Label::Unknown;
  std::optional<Label> predicted;
};

struct FeatureTable {
  std::vector<FeatureRow> rows;
};

struct ExtractFailure {
  std::string path;
  std::string message;
  bool io = false;  // unreadable file, as opposed to invalid content
};

struct ExtractResult {
  FeatureTable table;
  std::vector<ExtractFailure> failures;
};

// One row per successfully processed entry, in manifest order regardless of
// cfg.threads. Failed entries are reported, not thrown.
ExtractResult extract_all(const DatasetManifest& manifest, const PipelineConfig& cfg);

// Header: id,mean,entropy,variance,skewness,kurtosis,label[,predicted]
std::string table_to_csv(const FeatureTable& table);
// Throws InvalidArgument on missing columns, bad numbers or unknown labels.
FeatureTable table_from_csv(const std::string& text);

// Rows with an unknown label are rejected with InvalidArgument.
std::vector<LabeledSample> to_samples(const FeatureTable& table);

template <typename T>
struct Split {
  std::vector<T> train;
  std::vector<T> test;
};

// Stratified, seeded split. The train side receives round(n * fraction) items
// (ties up), shared between the classes by largest remainder with fertile
// winning ties; each side is then shuffled. Throws InvalidArgument when a class
// is missing or a label is unknown.
template <typename T, typename LabelOf>
Split<T> stratified_split(const std::vector<T>& items, LabelOf label_of, std::uint64_t seed,
                          double train_fraction = 0.5);

Split<DatasetEntry> split(const DatasetManifest& manifest, std::uint64_t seed,
                          double train_fraction = 0.5);
Split<FeatureRow> split(const FeatureTable& table, std::uint64_t seed,
                        double train_fraction = 0.5);

// --- implementation -------------------------------------------------------

namespace detail {
std::pair<std::size_t, std::size_t> train_counts(std::size_t n_fertile, std::size_t n_infertile,
                                                 double train_fraction);
}

template <typename T, typename LabelOf>
Split<T> stratified_split(const std::vector<T>& items, LabelOf label_of, std::uint64_t seed,
                          double train_fraction) {
  std::vector<std::size_t> fertile, infertile;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const Label l = label_of(items[i]);
    if (l == Label::Fertile) {
      fertile.push_back(i);
    } else if (l == Label::Infertile) {
      infertile.push_back(i);
    } else {
      throw InvalidArgument("split: every entry needs a fertile/infertile label");
    }
  }
  if (fertile.empty() || infertile.empty()) {
    throw InvalidArgument("split: both classes must be present");
  }
  const auto [train_f, train_i] =
      detail::train_counts(fertile.size(), infertile.size(), train_fraction);

  Rng rng(seed);
  rng.shuffle(fertile);
  rng.shuffle(infertile);
  std::vector<std::size_t> train_idx(fertile.begin(), fertile.begin() + train_f);
  train_idx.insert(train_idx.end(), infertile.begin(), infertile.begin() + train_i);
  std::vector<std::size_t> test_idx(fertile.begin() + train_f, fertile.end());
  test_idx.insert(test_idx.end(), infertile.begin() + train_i, infertile.end());
  rng.shuffle(train_idx);
  rng.shuffle(test_idx);

  Split<T> out;
  for (std::size_t i : train_idx) out.train.push_back(items[i]);
  for (std::size_t i : test_idx) out.test.push_back(items[i]);
  return out;
}

}  // namespace ovoscope
