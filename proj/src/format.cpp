#include "spsel/format.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace spsel {

std::optional<StorageFormat> formatFromCode(int code) {
  if (code < 0 || code >= kNumFormats) return std::nullopt;
  return static_cast<StorageFormat>(code);
}

std::optional<StorageFormat> parseFormat(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (auto f : kAllFormats)
    if (formatName(f) == upper) return f;
  return std::nullopt;
}

}  // namespace spsel
