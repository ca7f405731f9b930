#pragma once

// Shared text analytics: UTF-8 helpers, tokenization, sentence counting,
// syllable heuristic and the embedded English stopword list.

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hintkit {

/// Decodes UTF-8; malformed sequences become U+FFFD.
std::u32string decode_utf8(std::string_view text);
std::string encode_utf8(std::u32string_view text);
std::size_t utf8_length(std::string_view text);
/// Slice by code-point offsets [start, end). Out-of-range offsets are clamped.
std::string utf8_slice(std::string_view text, std::size_t start, std::size_t end);

bool is_word_char(char32_t c) noexcept;
bool is_upper(char32_t c) noexcept;
char32_t to_lower(char32_t c) noexcept;
std::string to_lower(std::string_view text);

struct Token {
  std::string text;     // lowercased
  std::string surface;  // as written
  std::size_t start = 0;  // code-point offsets into the source text
  std::size_t end = 0;
  bool sentence_initial = false;
};

/// Word tokens: maximal runs of letters/digits, keeping apostrophes that sit
/// between two word characters ("don't"). Lowercased.
std::vector<Token> tokenize_spans(std::string_view text);
std::vector<std::string> tokenize(std::string_view text);

struct TextStats {
  std::vector<std::string> tokens;
  std::size_t sentences = 0;
  std::vector<int> syllables_per_token;
  std::size_t letters = 0;  // letter/digit code points inside tokens
  std::size_t words = 0;
};

TextStats analyze_text(std::string_view text);

/// Vowel-group count with a silent-e adjustment, floored at 1.
int count_syllables(std::string_view lowered_token);

bool is_stopword(std::string_view lowered_token);
std::span<const std::string_view> stopwords();

}  // namespace hintkit
