#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace reibun::unicode {

/// Decodes UTF-8 into code points. Invalid sequences decode to U+FFFD.
std::u32string decode(std::string_view utf8);
std::string encode(std::u32string_view cps);

std::size_t codepoint_count(std::string_view utf8);

/// NFKC normalisation via ICU.
std::string nfkc(std::string_view utf8);

/// True for code points in the CJK Unified Ideographs block or one of
/// its extension blocks (A through H).
bool is_kanji(char32_t cp);

bool is_whitespace(char32_t cp);

/// Latin (including full-width forms), Cyrillic or Arabic script letters.
/// Common-script characters such as ASCII digits and punctuation are not
/// foreign.
bool is_foreign_script(char32_t cp);

bool contains_foreign_script(std::string_view utf8);

}  // namespace reibun::unicode
