#include "ovoscope/dataset.hpp"


#include "json.hpp"
#include "ovoscope/error.hpp"
#include "ovoscope/raster.hpp"

namespace ovoscope {

DatasetManifest load_manifest(const std::filesystem::path& file) {
  const std::vector<std::uint8_t> bytes = read_file(file);
  DatasetManifest m;
  try {
    const auto j = nlohmann::json::parse(bytes.begin(), bytes.end());
    if (!j.is_array()) {
      throw InvalidArgument("manifest: expected a JSON array");
    }
    const std::filesystem::path base = file.parent_path();
    m.base_dir = base;
    for (const auto& e : j) {
      DatasetEntry entry;
      std::filesystem::path p = e.at("path").get<std::string>();
      entry.path = p.is_relative() ? base / p : p;
      entry.label = parse_label(e.at("label").get<std::string>());
      if (!std::filesystem::exists(entry.path)) {
        throw IoError("manifest: missing file " + entry.path.string());
      }
      m.entries.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("manifest: ") + e.what());
  }
  return m;
}

std::string DatasetManifest::id_of(const DatasetEntry& entry) const {
  if (!base_dir.empty()) {
    const std::filesystem::path rel = entry.path.lexically_relative(base_dir);
    if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
  }
  return entry.path.generic_string();
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& file) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& e : manifest.entries) {
    j.push_back({{"path", e.path.generic_string()}, {"label", std::string(to_string(e.label))}});
  }
  const std::string text = j.dump(2) + "\n";
  write_file(file, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace ovoscope
