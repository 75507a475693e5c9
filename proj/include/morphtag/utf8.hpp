#pragma once

#include <string>
#include <string_view>

namespace morphtag::utf8 {

/// Decodes UTF-8 into code points. Throws InvalidUtf8 on malformed input.
std::u32string decode(std::string_view text);

std::string encode(char32_t cp);
std::string encode(std::u32string_view cps);

/// Number of code points in `text`.
std::size_t length(std::string_view text);

/// Simple case folding covering ASCII, Latin-1 Supplement and Latin Extended-A
/// (enough for Icelandic and most European orthographies). Code points outside
/// those blocks pass through unchanged.
char32_t to_lower(char32_t cp);
std::string to_lower(std::string_view text);

/// Strips trailing spaces, tabs and carriage returns.
std::string_view trim_right(std::string_view text);

}  // namespace morphtag::utf8
