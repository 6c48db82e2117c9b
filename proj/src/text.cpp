#include "trendguard/text.hpp"

#include <unicode/uchar.h>

namespace trendguard::text {

std::u32string decode_utf8(std::string_view s) {
  std::u32string out;
  out.reserve(s.size());
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    int len = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
      min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
      min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
      min = 0x10000;
    } else {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    if (i + len > n) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok || cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

std::string encode_utf8(std::u32string_view cps) {
  std::string out;
  out.reserve(cps.size());
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

char32_t fold_char(char32_t cp, const Locale& locale) {
  if (cp < 0x80) {
    if (cp >= 'A' && cp <= 'Z') {
      if (cp == 'I' && locale.turkic()) return 0x0131;
      return cp + 32;
    }
    return cp;
  }
  if (cp == 0x0130) return 'i';
  return static_cast<char32_t>(u_tolower(static_cast<UChar32>(cp)));
}

std::u32string fold(std::u32string_view cps, const Locale& locale) {
  std::u32string out(cps);
  for (auto& cp : out) cp = fold_char(cp, locale);
  return out;
}

std::string fold_utf8(std::string_view utf8, const Locale& locale) {
  return encode_utf8(fold(decode_utf8(utf8), locale));
}

bool is_space(char32_t cp) {
  if (cp < 0x80) return cp == ' ' || (cp >= '\t' && cp <= '\r');
  return u_isUWhiteSpace(static_cast<UChar32>(cp));
}

bool is_letter(char32_t cp) {
  if (cp < 0x80) return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
  return u_isalpha(static_cast<UChar32>(cp));
}

bool is_upper(char32_t cp) {
  if (cp < 0x80) return cp >= 'A' && cp <= 'Z';
  return u_isupper(static_cast<UChar32>(cp));
}

bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') ||
           (cp >= '0' && cp <= '9') || cp == '_';
  }
  const auto c = static_cast<UChar32>(cp);
  if (u_isalnum(c)) return true;
  const auto type = u_charType(c);
  return type == U_NON_SPACING_MARK || type == U_COMBINING_SPACING_MARK ||
         type == U_ENCLOSING_MARK;
}

bool is_emoji(char32_t cp) {
  if (cp < 0x80) return false;
  if (cp == 0x200D || cp == 0xFE0F || cp == 0xFE0E || cp == 0x20E3) return true;
  if (cp >= 0x1F1E6 && cp <= 0x1F1FF) return true;  // regional indicators
  if (cp >= 0xE0020 && cp <= 0xE007F) return true;  // tag sequences
  const auto c = static_cast<UChar32>(cp);
  return u_hasBinaryProperty(c, UCHAR_EXTENDED_PICTOGRAPHIC) ||
         u_hasBinaryProperty(c, UCHAR_EMOJI_PRESENTATION) ||
         u_hasBinaryProperty(c, UCHAR_EMOJI_MODIFIER);
}

std::u32string trim(std::u32string_view cps) {
  std::size_t b = 0;
  std::size_t e = cps.size();
  while (b < e && is_space(cps[b])) ++b;
  while (e > b && is_space(cps[e - 1])) --e;
  return std::u32string(cps.substr(b, e - b));
}

std::u32string collapse_spaces(std::u32string_view cps) {
  std::u32string out;
  out.reserve(cps.size());
  bool pending = false;
  for (char32_t cp : cps) {
    if (is_space(cp)) {
      pending = !out.empty();
      continue;
    }
    if (pending) out.push_back(U' ');
    pending = false;
    out.push_back(cp);
  }
  return out;
}

std::vector<std::u32string> split_spaces(std::u32string_view cps) {
  std::vector<std::u32string> tokens;
  std::u32string cur;
  for (char32_t cp : cps) {
    if (is_space(cp)) {
      if (!cur.empty()) tokens.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(cp);
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

std::vector<std::u32string> hashtag_tokens(std::u32string_view cps) {
  std::vector<std::u32string> tags;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if (cps[i] != U'#' && cps[i] != U'＃') continue;
    if (i > 0 && is_word_char(cps[i - 1])) continue;
    std::size_t j = i + 1;
    while (j < cps.size() && is_word_char(cps[j])) ++j;
    if (j > i + 1) tags.emplace_back(cps.substr(i + 1, j - i - 1));
    i = j - 1;
  }
  return tags;
}

}  // namespace trendguard::text
