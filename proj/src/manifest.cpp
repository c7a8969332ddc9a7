#include "spsel/manifest.hpp"

#include "spsel/error.hpp"
#include "spsel/io.hpp"

namespace spsel {

nlohmann::ordered_json RunManifest::toJson() const {
  nlohmann::ordered_json j;
  j["schema"] = "spsel-run-manifest";
  j["version"] = kToolVersion;
  j["command"] = command;
  j["config"] = config;
  j["seeds"] = seeds;
  j["inputs"] = inputs;
  j["outputs"] = outputs;
  j["results"] = results;
  j["timing"] = {{"wallSeconds", wall_seconds}};
  return j;
}

std::filesystem::path manifestPathFor(const std::filesystem::path& artifact) {
  return artifact.string() + ".manifest.json";
}

void writeManifest(const RunManifest& manifest, const std::filesystem::path& path) {
  auto out = openOutput(path);
  out << manifest.toJson().dump(1) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

nlohmann::ordered_json readManifest(const std::filesystem::path& path) {
  auto in = openInput(path);
  nlohmann::ordered_json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  if (!j.is_object() || j.value("schema", "") != "spsel-run-manifest")
    throw SchemaError(path.string() + ": not a run manifest");
  return j;
}

}  // namespace spsel
