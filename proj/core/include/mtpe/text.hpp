#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mtpe {

// Decodes UTF-8 into Unicode scalar values. Invalid byte sequences decode
// to U+FFFD, one replacement per rejected byte, so the function is total.
std::u32string decode_utf8(std::string_view text);

std::string encode_utf8(std::u32string_view scalars);

// Canonical composition (NFC) followed by whitespace cleanup: leading and
// trailing whitespace stripped, internal runs collapsed to a single space.
// "Whitespace" is the Unicode White_Space property, which covers tabs and
// the line/paragraph separators. Idempotent.
std::string normalize_text(std::string_view raw);

// Extended grapheme cluster count of a UTF-8 string.
std::size_t grapheme_count(std::string_view text);

// True when the text contains at least one scalar from a CJK-style script
// (Han, Hiragana, Katakana, Hangul, Bopomofo, Yi).
bool contains_cjk(std::string_view text);

}  // namespace mtpe
