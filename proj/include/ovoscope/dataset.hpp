#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ovoscope/eval.hpp"

namespace ovoscope {

struct DatasetEntry {
  std::filesystem::path path;
  Label label = Label::Unknown;
  friend bool operator==(const DatasetEntry&, const DatasetEntry&) = default;
};

struct DatasetManifest {
  std::vector<DatasetEntry> entries;
  // Directory the manifest was loaded from; empty for in-memory manifests.
  std::filesystem::path base_dir;

  // Row id for an entry: its path relative to base_dir.
  std::string id_of(const DatasetEntry& entry) const;
};

// JSON array of {"path", "label"}. Relative paths are resolved against the
// manifest's directory on load. Throws IoError or InvalidArgument; a listed
// file that does not exist is an IoError.
DatasetManifest load_manifest(const std::filesystem::path& file);
// Paths are written as given.
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& file);

}  // namespace ovoscope
