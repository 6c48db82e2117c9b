#pragma once

// UTF-8 handling and the handful of Unicode properties the classifiers need.

#include <string>
#include <string_view>
#include <vector>

#include "trendguard/core.hpp"

namespace trendguard::text {

// Invalid sequences decode to U+FFFD.
std::u32string decode_utf8(std::string_view utf8);
std::string encode_utf8(std::u32string_view cps);
void append_utf8(std::string& out, char32_t cp);

// Simple one-to-one lowercase mapping. With a Turkic locale 'I' folds to
// dotless 'ı' and 'İ' to 'i'. Keeps code point positions aligned.
char32_t fold_char(char32_t cp, const Locale& locale);
std::u32string fold(std::u32string_view cps, const Locale& locale);
std::string fold_utf8(std::string_view utf8, const Locale& locale);

bool is_space(char32_t cp);
bool is_letter(char32_t cp);
bool is_upper(char32_t cp);
// Letters, digits, underscore and combining marks: what a hashtag or a word
// token is made of.
bool is_word_char(char32_t cp);
// Pictographs, presentation emoji, skin-tone modifiers, regional indicators,
// plus the joiners and selectors that glue emoji sequences together.
bool is_emoji(char32_t cp);

std::u32string trim(std::u32string_view cps);
// Trims and replaces every whitespace run with one ASCII space.
std::u32string collapse_spaces(std::u32string_view cps);
std::vector<std::u32string> split_spaces(std::u32string_view cps);

// Hashtag tokens ('#' not preceded by a word character, followed by word
// characters), returned without the '#'. Input is used as given.
std::vector<std::u32string> hashtag_tokens(std::u32string_view cps);

}  // namespace trendguard::text
