#include "tamperkit/textutil.hpp"

#include <cctype>

namespace tamperkit::text {

namespace {

constexpr char32_t kReplacement = 0xFFFD;
constexpr char32_t kLeftCurly = 0x201C;
constexpr char32_t kRightCurly = 0x201D;

bool is_word_char(char32_t c) {
    if (c < 0x80) {
        return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    }
    return c != kLeftCurly && c != kRightCurly && c != kReplacement;
}

} // namespace

std::u32string utf8_decode(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    size_t i = 0;
    while (i < s.size()) {
        const uint8_t b0 = static_cast<uint8_t>(s[i]);
        size_t len = 0;
        char32_t cp = 0;
        if (b0 < 0x80) {
            len = 1;
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07;
        } else {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        if (i + len > s.size()) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        bool ok = true;
        for (size_t k = 1; k < len; ++k) {
            const uint8_t b = static_cast<uint8_t>(s[i + k]);
            if ((b & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (b & 0x3F);
        }
        if (!ok || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

std::string utf8_encode(const std::u32string& s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t cp : s) {
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
    return out;
}

bool is_double_quote(char32_t c) {
    return c == U'"' || c == kLeftCurly || c == kRightCurly;
}

namespace {

size_t find_quote(const std::u32string& u, size_t from) {
    for (size_t i = from; i < u.size(); ++i) {
        if (is_double_quote(u[i])) return i;
    }
    return std::u32string::npos;
}

} // namespace

SentenceSplit split_first_sentence(std::string_view s) {
    const std::u32string u = utf8_decode(s);
    bool in_quotes = false;
    for (size_t i = 0; i < u.size(); ++i) {
        const char32_t c = u[i];
        if (is_double_quote(c)) {
            in_quotes = !in_quotes;
            continue;
        }
        if (!in_quotes && (c == U'.' || c == U'!' || c == U'?')) {
            return {utf8_encode(u.substr(0, i + 1)), utf8_encode(u.substr(i + 1))};
        }
    }
    return {utf8_encode(u), ""};
}

std::string first_quoted_span(std::string_view s) {
    const std::u32string u = utf8_decode(s);
    const size_t open = find_quote(u, 0);
    if (open == std::u32string::npos) return "";
    const size_t close = find_quote(u, open + 1);
    if (close == std::u32string::npos) return "";
    return utf8_encode(u.substr(open + 1, close - open - 1));
}

std::string remove_quoted_spans(std::string_view s) {
    const std::u32string u = utf8_decode(s);
    std::u32string out;
    out.reserve(u.size());
    size_t i = 0;
    while (i < u.size()) {
        if (is_double_quote(u[i])) {
            const size_t close = find_quote(u, i + 1);
            if (close == std::u32string::npos) {
                out.append(u.substr(i));
                break;
            }
            i = close + 1;
            continue;
        }
        out.push_back(u[i]);
        ++i;
    }
    return utf8_encode(out);
}

std::string casefold(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

std::vector<std::string> tokenize_words(std::string_view s) {
    const std::u32string u = utf8_decode(s);
    std::vector<std::string> tokens;
    std::u32string cur;
    for (char32_t c : u) {
        if (is_word_char(c)) {
            cur.push_back(c);
        } else if (!cur.empty()) {
            tokens.push_back(casefold(utf8_encode(cur)));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(casefold(utf8_encode(cur)));
    return tokens;
}

std::string base64_encode(const uint8_t* data, size_t size) {
    static const char* alphabet =
        "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((size + 2) / 3 * 4);
    size_t i = 0;
    for (; i + 2 < size; i += 3) {
        const uint32_t n = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
        out.push_back(alphabet[(n >> 18) & 0x3F]);
        out.push_back(alphabet[(n >> 12) & 0x3F]);
        out.push_back(alphabet[(n >> 6) & 0x3F]);
        out.push_back(alphabet[n & 0x3F]);
    }
    if (i + 1 == size) {
        const uint32_t n = data[i] << 16;
        out.push_back(alphabet[(n >> 18) & 0x3F]);
        out.push_back(alphabet[(n >> 12) & 0x3F]);
        out.append("==");
    } else if (i + 2 == size) {
        const uint32_t n = (data[i] << 16) | (data[i + 1] << 8);
        out.push_back(alphabet[(n >> 18) & 0x3F]);
        out.push_back(alphabet[(n >> 12) & 0x3F]);
        out.push_back(alphabet[(n >> 6) & 0x3F]);
        out.push_back('=');
    }
    return out;
}

uint64_t fnv1a64(const uint8_t* data, size_t size, uint64_t seed) {
    uint64_t h = seed;
    for (size_t i = 0; i < size; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string to_hex64(uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[v & 0xF];
        v >>= 4;
    }
    return out;
}

} // namespace tamperkit::text
