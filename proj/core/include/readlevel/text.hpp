#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// Byte-level helpers for UTF-8 text. ASCII is classified exactly; every
// non-ASCII code point is treated as a letter, so accented words stay whole.
namespace readlevel::text {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

bool is_ascii_alpha(char c);
bool is_ascii_alnum(char c);
/// True for ASCII alphanumerics and for any byte of a multi-byte sequence.
bool is_word_byte(char c);

std::size_t codepoint_count(std::string_view s);
/// Letters counted as code points: ASCII alpha plus every non-ASCII code point.
std::size_t letter_count(std::string_view s);

/// A token counts as a word when it contains at least one letter or digit.
bool is_word(std::string_view surface);

}  // namespace readlevel::text
