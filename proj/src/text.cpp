#include "hintkit/text.hpp"

#include <algorithm>

namespace hintkit {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

bool is_space(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' || c == 0xA0 ||
         c == 0x1680 || (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F ||
         c == 0x205F || c == 0x3000;
}

bool is_apostrophe(char32_t c) { return c == '\'' || c == 0x2019; }

bool is_terminal(char32_t c) { return c == '.' || c == '!' || c == '?'; }

bool is_ascii_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

}  // namespace

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    int len = 0;
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
    if (i + len > text.size()) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    bool ok = true;
    for (int k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(text[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (b & 0x3F);
    }
    if (!ok) {
      out.push_back(kReplacement);
      ++i;
      continue;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t c : text) {
    if (c < 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (c >> 6)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (c >> 12)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (c >> 18)));
      out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
  }
  return out;
}

std::size_t utf8_length(std::string_view text) { return decode_utf8(text).size(); }

std::string utf8_slice(std::string_view text, std::size_t start, std::size_t end) {
  const auto cps = decode_utf8(text);
  end = std::min(end, cps.size());
  start = std::min(start, end);
  return encode_utf8(std::u32string_view(cps).substr(start, end - start));
}

// Letters and digits. Outside ASCII this is a blacklist of the punctuation,
// symbol and space blocks, which is enough for Latin/Greek/Cyrillic/CJK text.
bool is_word_char(char32_t c) noexcept {
  if (c < 0x80) return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
  if (c < 0xC0) return c == 0xAA || c == 0xB5 || c == 0xBA;
  if (c == 0xD7 || c == 0xF7) return false;
  if (c == kReplacement) return false;
  if (is_space(c)) return false;
  if (c >= 0x2000 && c <= 0x2BFF) return false;  // punctuation, symbols, arrows, math
  if (c >= 0x3000 && c <= 0x303F) return false;  // CJK punctuation
  if (c >= 0xFE10 && c <= 0xFE6F) return false;
  if (c >= 0xFF00 && c <= 0xFF0F) return false;
  if (c >= 0xFF1A && c <= 0xFF20) return false;
  if (c >= 0x1F000 && c <= 0x1FAFF) return false;  // emoji and pictographs
  return true;
}

bool is_upper(char32_t c) noexcept { return to_lower(c) != c; }

char32_t to_lower(char32_t c) noexcept {
  if (c >= 'A' && c <= 'Z') return c + 32;
  if (c < 0xC0) return c;
  if (c <= 0xDE && c != 0xD7) return c + 32;
  if (c >= 0x100 && c <= 0x137) return (c % 2 == 0) ? c + 1 : c;
  if (c >= 0x139 && c <= 0x148) return (c % 2 == 1) ? c + 1 : c;
  if (c >= 0x14A && c <= 0x177) return (c % 2 == 0) ? c + 1 : c;
  if (c >= 0x179 && c <= 0x17E) return (c % 2 == 1) ? c + 1 : c;
  if (c >= 0x391 && c <= 0x3A9 && c != 0x3A2) return c + 32;
  if (c >= 0x400 && c <= 0x40F) return c + 80;
  if (c >= 0x410 && c <= 0x42F) return c + 32;
  return c;
}

std::string to_lower(std::string_view text) {
  auto cps = decode_utf8(text);
  for (auto& c : cps) c = to_lower(c);
  return encode_utf8(cps);
}

std::vector<Token> tokenize_spans(std::string_view text) {
  const auto cps = decode_utf8(text);
  std::vector<Token> tokens;
  bool at_sentence_start = true;
  std::size_t i = 0;
  while (i < cps.size()) {
    const char32_t c = cps[i];
    if (is_word_char(c)) {
      std::size_t j = i;
      std::u32string lowered;
      while (j < cps.size()) {
        if (is_word_char(cps[j])) {
          lowered.push_back(to_lower(cps[j]));
          ++j;
        } else if (is_apostrophe(cps[j]) && j + 1 < cps.size() && is_word_char(cps[j + 1])) {
          lowered.push_back('\'');
          ++j;
        } else {
          break;
        }
      }
      Token tok;
      tok.text = encode_utf8(lowered);
      tok.surface = encode_utf8(std::u32string_view(cps).substr(i, j - i));
      tok.start = i;
      tok.end = j;
      tok.sentence_initial = at_sentence_start;
      tokens.push_back(std::move(tok));
      at_sentence_start = false;
      i = j;
      continue;
    }
    if (is_terminal(c) && (i + 1 == cps.size() || is_space(cps[i + 1]))) at_sentence_start = true;
    ++i;
  }
  return tokens;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (auto& tok : tokenize_spans(text)) out.push_back(std::move(tok.text));
  return out;
}

int count_syllables(std::string_view token) {
  int groups = 0;
  bool in_group = false;
  for (char c : token) {
    const bool vowel = is_ascii_vowel(c);
    if (vowel && !in_group) ++groups;
    in_group = vowel;
  }
  const auto n = token.size();
  if (n >= 2 && token[n - 1] == 'e' && !is_ascii_vowel(token[n - 2])) {
    const bool consonant_le = n >= 3 && token[n - 2] == 'l' && !is_ascii_vowel(token[n - 3]);
    if (!consonant_le) --groups;
  }
  return std::max(groups, 1);
}

TextStats analyze_text(std::string_view text) {
  TextStats stats;
  const auto spans = tokenize_spans(text);
  for (const auto& tok : spans) {
    if (tok.sentence_initial) ++stats.sentences;
    stats.syllables_per_token.push_back(count_syllables(tok.text));
    for (char32_t c : decode_utf8(tok.text))
      if (is_word_char(c)) ++stats.letters;
    stats.tokens.push_back(tok.text);
  }
  stats.words = stats.tokens.size();
  if (stats.sentences == 0) {
    const auto cps = decode_utf8(text);
    if (std::any_of(cps.begin(), cps.end(), [](char32_t c) { return !is_space(c); })) stats.sentences = 1;
  }
  return stats;
}

}  // namespace hintkit
