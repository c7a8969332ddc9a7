#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace spsel {

/// Candidate storage formats. The integer codes double as classifier labels.
enum class StorageFormat : int {
  kCoo = 0,
  kCsr = 1,
  kCsc = 2,
  kDia = 3,
  kBsr = 4,
  kDok = 5,
  kLil = 6,
};

inline constexpr int kNumFormats = 7;

inline constexpr std::array<StorageFormat, kNumFormats> kAllFormats = {
    StorageFormat::kCoo, StorageFormat::kCsr, StorageFormat::kCsc, StorageFormat::kDia,
    StorageFormat::kBsr, StorageFormat::kDok, StorageFormat::kLil};

constexpr int formatCode(StorageFormat f) { return static_cast<int>(f); }

constexpr std::string_view formatName(StorageFormat f) {
  constexpr std::array<std::string_view, kNumFormats> names = {"COO", "CSR", "CSC", "DIA",
                                                                "BSR", "DOK", "LIL"};
  return names[static_cast<std::size_t>(formatCode(f))];
}

std::optional<StorageFormat> formatFromCode(int code);

/// Case-insensitive lookup by name ("csr", "CSR").
std::optional<StorageFormat> parseFormat(std::string_view name);

}  // namespace spsel
