#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tamperkit::text {

/// Lenient UTF-8 decode; invalid sequences become U+FFFD.
std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(const std::u32string& s);

/// Straight double quote or one of the curly dialects (U+201C/U+201D).
bool is_double_quote(char32_t c);

struct SentenceSplit {
    std::string first;     // first sentence, terminator included when present
    std::string remainder; // exact suffix after the first sentence
};

/// Splits at the first '.', '!' or '?' found outside double quotes (straight
/// or curly). Without a terminator the whole text is the first sentence.
/// first + remainder reproduces the input bytes.
SentenceSplit split_first_sentence(std::string_view s);

/// Content between the first matched pair of double quotes, empty when no
/// pair exists.
std::string first_quoted_span(std::string_view s);

/// Removes every matched quoted span, quotes included. An unmatched opening
/// quote and everything after it are kept.
std::string remove_quoted_spans(std::string_view s);

/// ASCII-only case folding; non-ASCII code points pass through.
std::string casefold(std::string_view s);

/// Casefolded tokens split on runs of non-alphanumeric characters
/// (non-ASCII code points count as word characters).
std::vector<std::string> tokenize_words(std::string_view s);

std::string base64_encode(const uint8_t* data, size_t size);

/// FNV-1a 64-bit, used to key annotator fixtures by request content.
uint64_t fnv1a64(const uint8_t* data, size_t size, uint64_t seed = 0xcbf29ce484222325ull);
std::string to_hex64(uint64_t v);

} // namespace tamperkit::text
