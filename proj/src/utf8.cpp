#include "lmc/utf8.hpp"

#include <cstdint>

namespace lmc::utf8 {

namespace {

// Length of the scalar starting at text[i], or 0 if malformed.
std::size_t sequence_length(std::string_view text, std::size_t i) {
  const auto b0 = static_cast<std::uint8_t>(text[i]);
  if (b0 < 0x80) return 1;
  std::size_t len;
  std::uint32_t cp;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return 0;
  }
  if (i + len > text.size()) return 0;
  for (std::size_t k = 1; k < len; ++k) {
    const auto b = static_cast<std::uint8_t>(text[i + k]);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  static constexpr std::uint32_t kMinForLength[5] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMinForLength[len]) return 0;           // overlong
  if (cp > 0x10FFFF) return 0;                     // out of range
  if (cp >= 0xD800 && cp <= 0xDFFF) return 0;      // surrogate
  return len;
}

}  // namespace

std::optional<std::size_t> count_scalars(std::string_view text) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < text.size();) {
    const std::size_t len = sequence_length(text, i);
    if (len == 0) return std::nullopt;
    i += len;
    ++count;
  }
  return count;
}

bool is_valid(std::string_view text) { return count_scalars(text).has_value(); }

std::size_t offset_of_scalar(std::string_view text, std::size_t n) {
  std::size_t i = 0;
  for (std::size_t seen = 0; i < text.size() && seen < n; ++seen) {
    const auto b0 = static_cast<std::uint8_t>(text[i]);
    if (b0 < 0x80) {
      i += 1;
    } else if ((b0 & 0xE0) == 0xC0) {
      i += 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      i += 3;
    } else {
      i += 4;
    }
  }
  return i < text.size() ? i : text.size();
}

}  // namespace lmc::utf8
