#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

namespace lmc::utf8 {

/// Number of Unicode scalar values, or nullopt when `text` is not valid
/// UTF-8 (overlongs, surrogates and values above U+10FFFF are rejected).
std::optional<std::size_t> count_scalars(std::string_view text);

bool is_valid(std::string_view text);

/// Byte offset of the `n`-th scalar value (text.size() when n is past the end).
/// Assumes valid UTF-8.
std::size_t offset_of_scalar(std::string_view text, std::size_t n);

}  // namespace lmc::utf8
