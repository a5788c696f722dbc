#include "sgmfs/manifest.hpp"

#include <json.hpp>

namespace sgmfs {

namespace {

using nlohmann::json;

json config_to_json(const SgmfsConfig& config) {
  return json{{"alpha", config.alpha},
              {"beta", config.beta},
              {"gamma", config.gamma},
              {"lsd", config.lsd},
              {"max_iters", config.max_iters},
              {"tol", config.tol},
              {"epsilon_d", config.epsilon_d},
              {"seed", config.seed},
              {"sigma", config.sigma},
              {"legacy_c", config.legacy_c},
              {"literal_order", config.literal_order}};
}

SgmfsConfig config_from_json(const json& j) {
  SgmfsConfig config;
  config.alpha = j.at("alpha").get<double>();
  config.beta = j.at("beta").get<double>();
  config.gamma = j.at("gamma").get<double>();
  config.lsd = j.at("lsd").get<int>();
  config.max_iters = j.at("max_iters").get<int>();
  config.tol = j.at("tol").get<double>();
  config.epsilon_d = j.at("epsilon_d").get<double>();
  config.seed = j.at("seed").get<std::uint64_t>();
  config.sigma = j.at("sigma").get<double>();
  config.legacy_c = j.at("legacy_c").get<bool>();
  config.literal_order = j.at("literal_order").get<bool>();
  return config;
}

}  // namespace

std::string emit_manifest(const RunManifest& manifest, bool include_timings) {
  json j{{"command", manifest.command},
         {"tool_version", manifest.tool_version},
         {"data_path", manifest.data_path},
         {"labels_xml", manifest.labels_xml},
         {"format", manifest.format},
         {"label_count", manifest.label_count},
         {"config", config_to_json(manifest.config)},
         {"labeled_fractions", manifest.labeled_fractions},
         {"proportions", manifest.proportions},
         {"runs", manifest.runs},
         {"train_count", manifest.train_count},
         {"test_count", manifest.test_count},
         {"mlknn_k", manifest.mlknn_k},
         {"mlknn_smoothing", manifest.mlknn_smoothing},
         {"standardize", manifest.standardize}};
  if (include_timings) {
    j["phase_seconds"] = manifest.phase_seconds;
  }
  return j.dump();
}

RunManifest parse_manifest(const std::string& json_text) {
  const json j = json::parse(json_text);
  RunManifest manifest;
  manifest.command = j.at("command").get<std::string>();
  manifest.tool_version = j.at("tool_version").get<std::string>();
  manifest.data_path = j.at("data_path").get<std::string>();
  manifest.labels_xml = j.at("labels_xml").get<std::string>();
  manifest.format = j.at("format").get<std::string>();
  manifest.label_count = j.at("label_count").get<int>();
  manifest.config = config_from_json(j.at("config"));
  manifest.labeled_fractions = j.at("labeled_fractions").get<std::vector<double>>();
  manifest.proportions = j.at("proportions").get<std::vector<double>>();
  manifest.runs = j.at("runs").get<int>();
  manifest.train_count = j.at("train_count").get<int>();
  manifest.test_count = j.at("test_count").get<int>();
  manifest.mlknn_k = j.at("mlknn_k").get<int>();
  manifest.mlknn_smoothing = j.at("mlknn_smoothing").get<double>();
  manifest.standardize = j.at("standardize").get<bool>();
  if (j.contains("phase_seconds")) {
    manifest.phase_seconds =
        j.at("phase_seconds").get<std::map<std::string, double>>();
  }
  return manifest;
}

}  // namespace sgmfs
