#include <string>

#include "json.hpp"
#include "ovoscope/error.hpp"
#include "ovoscope/features.hpp"
#include "ovoscope/svm.hpp"

namespace ovoscope {

using nlohmann::json;

std::string model_to_json(const SvmModel& model) {
  json j;
  std::vector<std::string> order;
  if (model.dimension() == kFeatureCount) {
    order.assign(kFeatureNames.begin(), kFeatureNames.end());
  } else {
    for (std::size_t k = 0; k < model.dimension(); ++k) order.push_back("x" + std::to_string(k));
  }
  j["feature_order"] = order;
  j["weights"] = model.weights;
  j["bias"] = model.bias;
  j["c"] = model.c;
  j["standardize"] = model.scaling.has_value();
  if (model.scaling) {
    j["means"] = model.scaling->means;
    j["scales"] = model.scaling->scales;
  }
  json svs = json::array();
  for (const auto& sv : model.support_vectors) {
    svs.push_back({{"x", sv.x}, {"y", sv.y}, {"alpha", sv.alpha}});
  }
  j["support_vectors"] = std::move(svs);
  // Doubles are written in shortest round-trip form, so reading back is bit-exact.
  return j.dump(2) + "\n";
}

SvmModel model_from_json(const std::string& text) {
  SvmModel m;
  try {
    const json j = json::parse(text);
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
    m.c = j.at("c").get<double>();
    if (j.at("standardize").get<bool>()) {
      FeatureScaling s;
      s.means = j.at("means").get<std::vector<double>>();
      s.scales = j.at("scales").get<std::vector<double>>();
      if (s.means.size() != m.weights.size() || s.scales.size() != m.weights.size()) {
        throw InvalidArgument("model: scaling dimension does not match weights");
      }
      m.scaling = std::move(s);
    }
    for (const auto& sv : j.at("support_vectors")) {
      SupportVector v;
      v.x = sv.at("x").get<std::vector<double>>();
      v.y = sv.at("y").get<int>();
      v.alpha = sv.at("alpha").get<double>();
      if (v.x.size() != m.weights.size() || (v.y != 1 && v.y != -1)) {
        throw InvalidArgument("model: malformed support vector");
      }
      m.support_vectors.push_back(std::move(v));
    }
    if (j.at("feature_order").size() != m.weights.size()) {
      throw InvalidArgument("model: feature_order does not match weights");
    }
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("model: ") + e.what());
  }
  if (m.weights.empty()) {
    throw InvalidArgument("model: empty weight vector");
  }
  return m;
}

}  // namespace ovoscope
