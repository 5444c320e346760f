// Thin wrapper over ICU plus a hand-rolled UTF-8 codec.  All Unicode-aware
// decisions in the pipeline (categories, white space, case folding, NFC) go
// through this header so the policy lives in one place.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace corpuskit {

// Decodes UTF-8 into scalar values.  Invalid sequences decode to U+FFFD one
// byte at a time, so the function is total.
std::vector<char32_t> utf8_decode(std::string_view s);

// Appends one scalar value as UTF-8.
void utf8_append(std::string& out, char32_t cp);

// Number of Unicode scalar values in a valid UTF-8 string (continuation
// bytes excluded).
std::size_t utf8_scalar_count(std::string_view s);

// General category P* or S* (the "punctuation" dropped by normalize()).
bool is_punct_or_symbol(char32_t cp);

// Unicode White_Space property.
bool is_white_space(char32_t cp);

// Letter (L*) or decimal digit (Nd).
bool is_alphanumeric(char32_t cp);

// Decimal digit (Nd).
bool is_decimal_digit(char32_t cp);

// Canonical composition (NFC).
std::string nfc(std::string_view s);

// Root-locale lowercasing (full case mapping, locale-independent).
std::string lower_root(std::string_view s);

}  // namespace corpuskit
