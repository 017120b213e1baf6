#include "ovoscope/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <thread>
#include <variant>

#include "ovoscope/csv.hpp"
#include "ovoscope/error.hpp"

namespace ovoscope {

GrayImage preprocess_one(const std::filesystem::path& path, const PipelineConfig& cfg) {
  const std::string where = path.generic_string() + ": ";
  try {
    const AnyImage decoded = read_netpbm(path);
    const GrayImage gray = std::visit(
        [&](const auto& img) -> GrayImage {
          using T = std::decay_t<decltype(img)>;
          if constexpr (std::is_same_v<T, RgbImage>) {
            return to_grayscale(segment_crop(img, cfg.threshold));
          } else {
            return segment_crop(img, cfg.threshold);
          }
        },
        decoded);
    return enhance(gray, cfg.enhance, cfg.clahe);
  } catch (const IoError& e) {
    throw IoError(where + e.what());
  } catch (const ParseError& e) {
    throw ParseError(e.kind(), where + e.what());
  } catch (const NoObjectError& e) {
    throw NoObjectError(where + e.what());
  } catch (const DegenerateHistogramError& e) {
    throw DegenerateHistogramError(where + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(where + e.what());
  }
}

ExtractResult extract_all(const DatasetManifest& manifest, const PipelineConfig& cfg) {
  const std::size_t n = manifest.entries.size();
  struct Slot {
    std::optional<FeatureRow> row;
    std::optional<ExtractFailure> failure;
  };
  std::vector<Slot> slots(n);

  auto work = [&](std::size_t i) {
    const DatasetEntry& e = manifest.entries[i];
    const std::string id = manifest.id_of(e);
    try {
      const GrayImage img = preprocess_one(e.path, cfg);
      FeatureVector f;
      try {
        f = extract_features(img);
      } catch (const DegenerateHistogramError& ex) {
        throw DegenerateHistogramError(e.path.generic_string() + ": " + ex.what());
      }
      slots[i].row = FeatureRow{id, f, e.label, std::nullopt};
    } catch (const IoError& ex) {
      slots[i].failure = ExtractFailure{id, ex.what(), true};
    } catch (const Error& ex) {
      slots[i].failure = ExtractFailure{id, ex.what(), false};
    }
  };

  const std::size_t threads = std::max<std::size_t>(1, std::min(cfg.threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) work(i);
      });
    }
  }

  ExtractResult result;
  for (auto& s : slots) {
    if (s.row) result.table.rows.push_back(std::move(*s.row));
    if (s.failure) result.failures.push_back(std::move(*s.failure));
  }
  return result;
}

std::string table_to_csv(const FeatureTable& table) {
  bool with_prediction = false;
  for (const auto& r : table.rows) with_prediction |= r.predicted.has_value();

  std::string out = "id";
  for (auto name : kFeatureNames) {
    out += ',';
    out += name;
  }
  out += ",label";
  if (with_prediction) out += ",predicted";
  out += '\n';
  for (const auto& r : table.rows) {
    out += csv::escape(r.id);
    for (double v : r.features.to_array()) {
      out += ',';
      out += csv::format_double(v);
    }
    out += ',';
    out += to_string(r.label);
    if (with_prediction) {
      out += ',';
      out += r.predicted ? to_string(*r.predicted) : "unknown";
    }
    out += '\n';
  }
  return out;
}

FeatureTable table_from_csv(const std::string& text) {
  const auto records = csv::parse(text);
  if (records.empty()) {
    throw InvalidArgument("features: empty CSV");
  }
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < records[0].size(); ++i) col[records[0][i]] = i;
  auto require = [&](const std::string& name) {
    const auto it = col.find(name);
    if (it == col.end()) throw InvalidArgument("features: missing column '" + name + "'");
    return it->second;
  };
  const std::size_t id_col = require("id");
  std::array<std::size_t, kFeatureCount> feat_col{};
  for (std::size_t k = 0; k < kFeatureCount; ++k) {
    feat_col[k] = require(std::string(kFeatureNames[k]));
  }
  const auto label_it = col.find("label");
  const auto pred_it = col.find("predicted");

  FeatureTable table;
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != records[0].size()) {
      throw InvalidArgument("features: row " + std::to_string(r) + " has " +
                            std::to_string(rec.size()) + " fields, expected " +
                            std::to_string(records[0].size()));
    }
    FeatureRow row;
    row.id = rec[id_col];
    std::array<double, kFeatureCount> v{};
    for (std::size_t k = 0; k < kFeatureCount; ++k) v[k] = csv::parse_double(rec[feat_col[k]]);
    row.features = FeatureVector::from_array(v);
    if (label_it != col.end()) row.label = parse_label(rec[label_it->second]);
    if (pred_it != col.end()) row.predicted = parse_label(rec[pred_it->second]);
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<LabeledSample> to_samples(const FeatureTable& table) {
  std::vector<LabeledSample> out;
  out.reserve(table.rows.size());
  for (const auto& r : table.rows) {
    if (r.label == Label::Unknown) {
      throw InvalidArgument("features: row '" + r.id + "' has no class label");
    }
    const auto a = r.features.to_array();
    out.push_back({std::vector<double>(a.begin(), a.end()), class_from_label(r.label)});
  }
  return out;
}

namespace detail {

std::pair<std::size_t, std::size_t> train_counts(std::size_t n_fertile, std::size_t n_infertile,
                                                 double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InvalidArgument("split: train fraction must lie in (0, 1)");
  }
  const double n = static_cast<double>(n_fertile + n_infertile);
  const auto total = static_cast<std::size_t>(std::floor(n * train_fraction + 0.5));
  const double qf = static_cast<double>(n_fertile) * train_fraction;
  const double qi = static_cast<double>(n_infertile) * train_fraction;
  auto tf = static_cast<std::size_t>(std::floor(qf));
  auto ti = static_cast<std::size_t>(std::floor(qi));
  // The floors fall short of the rounded total by at most two units; hand them
  // out by largest remainder.
  const bool fertile_first = qf - std::floor(qf) >= qi - std::floor(qi);
  for (int turn = 0; turn < 2 && tf + ti < total; ++turn) {
    const bool to_fertile = (turn == 0) == fertile_first;
    if (to_fertile && tf < n_fertile) {
      ++tf;
    } else if (!to_fertile && ti < n_infertile) {
      ++ti;
    }
  }
  return {std::min(tf, n_fertile), std::min(ti, n_infertile)};
}

}  // namespace detail

Split<DatasetEntry> split(const DatasetManifest& manifest, std::uint64_t seed,
                          double train_fraction) {
  return stratified_split(manifest.entries, [](const DatasetEntry& e) { return e.label; }, seed,
                          train_fraction);
}

Split<FeatureRow> split(const FeatureTable& table, std::uint64_t seed, double train_fraction) {
  return stratified_split(table.rows, [](const FeatureRow& r) { return r.label; }, seed,
                          train_fraction);
}

}  // namespace ovoscope
