#include "mtpe/text.hpp"

#include <unicode/ubrk.h>
#include <unicode/uchar.h>
#include <unicode/unorm2.h>
#include <unicode/uscript.h>
#include <unicode/ustring.h>
#include <unicode/utf16.h>
#include <unicode/utf8.h>

#include <stdexcept>

namespace mtpe {

namespace {

std::u16string to_utf16(std::string_view text) {
    std::u16string out(text.size() + 1, u'\0');
    UErrorCode ec = U_ZERO_ERROR;
    int32_t len = 0;
    u_strFromUTF8WithSub(reinterpret_cast<UChar*>(out.data()),
                         static_cast<int32_t>(out.size()), &len, text.data(),
                         static_cast<int32_t>(text.size()), 0xFFFD, nullptr, &ec);
    if (U_FAILURE(ec)) throw std::runtime_error("utf-16 conversion failed");
    out.resize(static_cast<std::size_t>(len));
    return out;
}

std::string to_utf8(std::u16string_view text) {
    std::string out(text.size() * 4 + 1, '\0');
    UErrorCode ec = U_ZERO_ERROR;
    int32_t len = 0;
    u_strToUTF8WithSub(out.data(), static_cast<int32_t>(out.size()), &len,
                       reinterpret_cast<const UChar*>(text.data()),
                       static_cast<int32_t>(text.size()), 0xFFFD, nullptr, &ec);
    if (U_FAILURE(ec)) throw std::runtime_error("utf-8 conversion failed");
    out.resize(static_cast<std::size_t>(len));
    return out;
}

std::u16string nfc(std::u16string_view text) {
    UErrorCode ec = U_ZERO_ERROR;
    const UNormalizer2* norm = unorm2_getNFCInstance(&ec);
    if (U_FAILURE(ec)) throw std::runtime_error("NFC normalizer unavailable");

    std::u16string out(text.size() + 16, u'\0');
    int32_t len = unorm2_normalize(norm, reinterpret_cast<const UChar*>(text.data()),
                                   static_cast<int32_t>(text.size()),
                                   reinterpret_cast<UChar*>(out.data()),
                                   static_cast<int32_t>(out.size()), &ec);
    if (ec == U_BUFFER_OVERFLOW_ERROR) {
        ec = U_ZERO_ERROR;
        out.resize(static_cast<std::size_t>(len));
        len = unorm2_normalize(norm, reinterpret_cast<const UChar*>(text.data()),
                               static_cast<int32_t>(text.size()),
                               reinterpret_cast<UChar*>(out.data()),
                               static_cast<int32_t>(out.size()), &ec);
    }
    if (U_FAILURE(ec)) throw std::runtime_error("NFC normalization failed");
    out.resize(static_cast<std::size_t>(len));
    return out;
}

}  // namespace

std::u32string decode_utf8(std::string_view text) {
    std::u32string out;
    out.reserve(text.size());
    int32_t i = 0;
    const int32_t n = static_cast<int32_t>(text.size());
    const auto* s = reinterpret_cast<const uint8_t*>(text.data());
    while (i < n) {
        UChar32 c;
        U8_NEXT(s, i, n, c);
        out.push_back(c < 0 ? char32_t{0xFFFD} : static_cast<char32_t>(c));
    }
    return out;
}

std::string encode_utf8(std::u32string_view scalars) {
    std::string out;
    out.reserve(scalars.size() * 2);
    for (char32_t c : scalars) {
        UChar32 cp = static_cast<UChar32>(c);
        if (cp < 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
        char buf[U8_MAX_LENGTH];
        int32_t len = 0;
        UBool err = false;
        U8_APPEND(reinterpret_cast<uint8_t*>(buf), len, U8_MAX_LENGTH, cp, err);
        if (!err) out.append(buf, static_cast<std::size_t>(len));
    }
    return out;
}

std::string normalize_text(std::string_view raw) {
    std::u16string composed = nfc(to_utf16(raw));

    std::u16string out;
    out.reserve(composed.size());
    bool pending_space = false;
    int32_t i = 0;
    const int32_t n = static_cast<int32_t>(composed.size());
    while (i < n) {
        UChar32 c;
        U16_NEXT(composed.data(), i, n, c);
        if (u_hasBinaryProperty(c, UCHAR_WHITE_SPACE)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(u' ');
            pending_space = false;
        }
        UChar units[2];
        int32_t len = 0;
        UBool err = false;
        U16_APPEND(units, len, 2, c, err);
        if (!err) out.append(reinterpret_cast<char16_t*>(units), static_cast<std::size_t>(len));
    }
    return to_utf8(out);
}

std::size_t grapheme_count(std::string_view text) {
    if (text.empty()) return 0;
    std::u16string utf16 = to_utf16(text);
    UErrorCode ec = U_ZERO_ERROR;
    UBreakIterator* it =
        ubrk_open(UBRK_CHARACTER, "", reinterpret_cast<const UChar*>(utf16.data()),
                  static_cast<int32_t>(utf16.size()), &ec);
    if (U_FAILURE(ec)) throw std::runtime_error("break iterator unavailable");
    std::size_t count = 0;
    for (int32_t p = ubrk_next(it); p != UBRK_DONE; p = ubrk_next(it)) ++count;
    ubrk_close(it);
    return count;
}

bool contains_cjk(std::string_view text) {
    for (char32_t c : decode_utf8(text)) {
        UErrorCode ec = U_ZERO_ERROR;
        UScriptCode script = uscript_getScript(static_cast<UChar32>(c), &ec);
        if (U_FAILURE(ec)) continue;
        switch (script) {
            case USCRIPT_HAN:
            case USCRIPT_HIRAGANA:
            case USCRIPT_KATAKANA:
            case USCRIPT_HANGUL:
            case USCRIPT_BOPOMOFO:
            case USCRIPT_YI:
                return true;
            default:
                break;
        }
    }
    return false;
}

}  // namespace mtpe
