#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace regiolex {

namespace utf8 {

/// Decodes UTF-8 into code points. Invalid sequences decode to U+FFFD, one
/// per offending byte, so malformed input never throws.
std::u32string decode(std::string_view text);
std::string encode(std::u32string_view codepoints);
void append(std::string& out, char32_t cp);

/// Number of code points in a UTF-8 string.
std::size_t length(std::string_view text);

}  // namespace utf8

/// Simple (1:1) lowercase mapping for Latin, Latin-1, Latin Extended-A,
/// Latin Extended Additional, Greek and Cyrillic. Code points outside those
/// blocks map to themselves.
char32_t to_lower(char32_t cp);
std::string to_lower(std::string_view text);

/// Splits a post into lowercased word tokens.
///
/// Whitespace and punctuation separate tokens. A '#' or '@' starts a new
/// token that runs to the next separator; such tokens (hashtags, mentions)
/// are dropped. Whitespace-delimited chunks that look like URLs or e-mail
/// addresses are dropped entirely. Letters, digits, '_' and any code point
/// not classified as punctuation (emoji included) are word characters.
std::vector<std::string> tokenize(std::string_view text);

/// Lowercases and collapses every run of more than three identical vowels
/// (a e i o u, plain or acute-accented) to exactly three. Idempotent.
std::string normalize_token(std::string_view token);

/// tokenize() followed by normalize_token() on every token.
std::vector<std::string> analyze(std::string_view text);

}  // namespace regiolex
