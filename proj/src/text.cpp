#include "regiolex/text.hpp"

#include <algorithm>
#include <array>

namespace regiolex {

namespace utf8 {

std::u32string decode(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  const auto* s = reinterpret_cast<const unsigned char*>(text.data());
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    const unsigned char b0 = s[i];
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    std::size_t len = 0;
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
    }
    bool ok = len != 0 && i + len <= n;
    for (std::size_t k = 1; ok && k < len; ++k) {
      if ((s[i + k] & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (s[i + k] & 0x3F);
      }
    }
    if (ok && (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))) {
      ok = false;
    }
    if (!ok) {
      out.push_back(0xFFFD);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

void append(std::string& out, char32_t cp) {
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

std::string encode(std::u32string_view codepoints) {
  std::string out;
  out.reserve(codepoints.size());
  for (char32_t cp : codepoints) {
    append(out, cp);
  }
  return out;
}

std::size_t length(std::string_view text) {
  return static_cast<std::size_t>(std::count_if(text.begin(), text.end(), [](char c) {
    return (static_cast<unsigned char>(c) & 0xC0) != 0x80;
  }));
}

}  // namespace utf8

char32_t to_lower(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
  }
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) {
    return cp + 32;
  }
  if (cp >= 0x100 && cp <= 0x17F) {
    if (cp == 0x130) return U'i';
    if (cp == 0x178) return 0xFF;
    if ((cp >= 0x100 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177)) {
      return (cp % 2 == 0) ? cp + 1 : cp;
    }
    if ((cp >= 0x139 && cp <= 0x148) || (cp >= 0x179 && cp <= 0x17E)) {
      return (cp % 2 == 1) ? cp + 1 : cp;
    }
    return cp;
  }
  if (cp >= 0x386 && cp <= 0x3AB) {
    if (cp == 0x386) return 0x3AC;
    if (cp >= 0x388 && cp <= 0x38A) return cp + 37;
    if (cp == 0x38C) return 0x3CC;
    if (cp == 0x38E || cp == 0x38F) return cp + 63;
    if (cp >= 0x391 && cp <= 0x3AB && cp != 0x3A2) return cp + 32;
    return cp;
  }
  if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 32;
  if ((cp >= 0x1E00 && cp <= 0x1E95) || (cp >= 0x1EA0 && cp <= 0x1EFF)) {
    return (cp % 2 == 0) ? cp + 1 : cp;
  }
  return cp;
}

std::string to_lower(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : utf8::decode(text)) {
    utf8::append(out, to_lower(cp));
  }
  return out;
}

namespace {

bool is_space(char32_t cp) {
  switch (cp) {
    case U' ': case U'\t': case U'\n': case U'\r': case U'\v': case U'\f':
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000: case 0xFEFF:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200B;
  }
}

bool is_ascii_alnum(char32_t cp) {
  return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
}

bool is_punct(char32_t cp) {
  if (cp < 0x80) {
    return !is_ascii_alnum(cp) && cp != U'_';
  }
  if (cp <= 0x9F) return true;  // C1 controls
  if (cp >= 0xA1 && cp <= 0xBF) {
    switch (cp) {
      case 0xAA: case 0xB2: case 0xB3: case 0xB5: case 0xB9: case 0xBA:
        return false;
      default:
        return true;
    }
  }
  if (cp == 0xD7 || cp == 0xF7) return true;
  if (cp >= 0x2010 && cp <= 0x2027) return true;
  if (cp >= 0x2030 && cp <= 0x205E) return true;
  if (cp >= 0x20A0 && cp <= 0x20CF) return true;
  if (cp >= 0x2190 && cp <= 0x21FF) return true;
  if (cp >= 0x3001 && cp <= 0x303F) return true;
  if (cp >= 0xFE30 && cp <= 0xFE6F) return true;
  if ((cp >= 0xFF01 && cp <= 0xFF0F) || (cp >= 0xFF1A && cp <= 0xFF20) ||
      (cp >= 0xFF3B && cp <= 0xFF40) || (cp >= 0xFF5B && cp <= 0xFF65)) {
    return true;
  }
  return cp == 0xFFFD;
}

bool is_marker(char32_t cp) { return cp == U'#' || cp == U'@'; }

bool starts_with(std::u32string_view s, std::u32string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

bool is_domain_char(char32_t cp) { return is_ascii_alnum(cp) || cp == U'-'; }

// "host.tld" with at least one dot and an alphabetic TLD of 2+ letters.
bool looks_like_host(std::u32string_view host) {
  const auto dot = host.rfind(U'.');
  if (dot == std::u32string_view::npos || dot == 0) return false;
  const auto tld = host.substr(dot + 1);
  if (tld.size() < 2) return false;
  for (char32_t cp : tld) {
    if (!((cp >= 'a' && cp <= 'z'))) return false;
  }
  for (char32_t cp : host) {
    if (!is_domain_char(cp) && cp != U'.') return false;
  }
  return host.find(U"..") == std::u32string_view::npos;
}

bool looks_like_url(std::u32string_view chunk) {
  std::size_t begin = 0;
  std::size_t end = chunk.size();
  while (begin < end && is_punct(chunk[begin]) && !is_marker(chunk[begin])) ++begin;
  while (end > begin && is_punct(chunk[end - 1])) --end;
  std::u32string s;
  s.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) s.push_back(to_lower(chunk[i]));
  if (s.empty()) return false;

  if (starts_with(s, U"http://") || starts_with(s, U"https://") || starts_with(s, U"www.") ||
      s.find(U"://") != std::u32string::npos) {
    return true;
  }
  const auto at = s.find(U'@');
  if (at != std::u32string::npos && at > 0 && looks_like_host(std::u32string_view(s).substr(at + 1))) {
    return true;
  }
  const auto slash = s.find(U'/');
  if (slash != std::u32string::npos && slash > 0 &&
      looks_like_host(std::u32string_view(s).substr(0, slash))) {
    return true;
  }
  return false;
}

bool is_collapsible_vowel(char32_t cp) {
  switch (cp) {
    case U'a': case U'e': case U'i': case U'o': case U'u':
    case 0xE1: case 0xE9: case 0xED: case 0xF3: case 0xFA:
      return true;
    default:
      return false;
  }
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  const std::u32string cps = utf8::decode(text);

  std::u32string current;
  bool marked = false;
  auto flush = [&] {
    if (!current.empty() && !marked) {
      std::string token;
      for (char32_t cp : current) utf8::append(token, to_lower(cp));
      tokens.push_back(std::move(token));
    }
    current.clear();
    marked = false;
  };

  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && is_space(cps[i])) ++i;
    std::size_t j = i;
    while (j < cps.size() && !is_space(cps[j])) ++j;
    const std::u32string_view chunk(cps.data() + i, j - i);
    if (!chunk.empty() && !looks_like_url(chunk)) {
      for (char32_t cp : chunk) {
        if (is_marker(cp)) {
          flush();
          marked = true;
          current.push_back(cp);
        } else if (is_punct(cp)) {
          flush();
        } else {
          current.push_back(cp);
        }
      }
      flush();
    }
    i = j;
  }
  return tokens;
}

std::string normalize_token(std::string_view token) {
  std::string out;
  out.reserve(token.size());
  char32_t previous = 0;
  int run = 0;
  for (char32_t cp : utf8::decode(token)) {
    cp = to_lower(cp);
    if (cp == previous) {
      ++run;
    } else {
      previous = cp;
      run = 1;
    }
    if (run > 3 && is_collapsible_vowel(cp)) continue;
    utf8::append(out, cp);
  }
  return out;
}

std::vector<std::string> analyze(std::string_view text) {
  std::vector<std::string> tokens = tokenize(text);
  for (auto& token : tokens) {
    token = normalize_token(token);
  }
  return tokens;
}

}  // namespace regiolex
