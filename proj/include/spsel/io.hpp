#pragma once

#include <filesystem>
#include <fstream>
#include <string>

#include "spsel/error.hpp"

namespace spsel {

inline std::ifstream openInput(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

inline std::ofstream openOutput(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

/// Runs `fn(stream)` on the opened file and prefixes parse errors with the path.
template <typename Fn>
auto withInputFile(const std::filesystem::path& path, Fn&& fn) {
  auto in = openInput(path);
  try {
    return fn(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace spsel
