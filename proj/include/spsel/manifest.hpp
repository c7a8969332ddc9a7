#pragma once

// Sidecar JSON written next to every artifact: which command produced it,
// with which settings and inputs. Everything except the "timing" object is
// a function of the command line, so reruns compare equal once timing is
// dropped.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace spsel {

inline constexpr const char* kToolVersion = "0.1.0";

struct RunManifest {
  std::string command;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  nlohmann::ordered_json seeds = nlohmann::ordered_json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  /// Command-specific results (selected features, global ranges, ...).
  nlohmann::ordered_json results = nlohmann::ordered_json::object();
  double wall_seconds = 0.0;

  nlohmann::ordered_json toJson() const;
};

/// `<artifact>.manifest.json`
std::filesystem::path manifestPathFor(const std::filesystem::path& artifact);

void writeManifest(const RunManifest& manifest, const std::filesystem::path& path);
/// IoError if missing, ParseError on bad JSON, SchemaError on a foreign file.
nlohmann::ordered_json readManifest(const std::filesystem::path& path);

}  // namespace spsel
