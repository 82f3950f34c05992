#include "cascadefuse/text.hpp"

#include <cctype>
#include <cstdint>

namespace cascadefuse {
namespace {

enum class CharClass { Separator, Word, Han };

bool is_han(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF) ||
         (cp >= 0xF900 && cp <= 0xFAFF) || (cp >= 0x20000 && cp <= 0x2A6DF);
}

CharClass classify(char32_t cp) {
  if (cp < 0x80) return std::isalnum(static_cast<int>(cp)) ? CharClass::Word : CharClass::Separator;
  if (is_han(cp)) return CharClass::Han;
  if (cp <= 0xBF || cp == 0xD7 || cp == 0xF7) return CharClass::Separator;  // Latin-1 punctuation
  if (cp >= 0x2000 && cp <= 0x2BFF) return CharClass::Separator;            // punctuation, symbols
  if (cp >= 0x3000 && cp <= 0x303F) return CharClass::Separator;            // CJK punctuation
  if (cp >= 0xFE30 && cp <= 0xFE4F) return CharClass::Separator;
  if (cp >= 0xFF00 && cp <= 0xFF0F) return CharClass::Separator;            // fullwidth punctuation
  if ((cp >= 0xFF1A && cp <= 0xFF20) || (cp >= 0xFF3B && cp <= 0xFF40) || (cp >= 0xFF5B && cp <= 0xFF65))
    return CharClass::Separator;
  if (cp >= 0x1F000) return CharClass::Separator;  // emoji and pictographs
  return CharClass::Word;
}

char32_t to_lower(char32_t cp) {
  if (cp < 0x80) return static_cast<char32_t>(std::tolower(static_cast<int>(cp)));
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 0x20;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 0x20;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 0x50;
  return cp;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// Decodes one code point at `pos`; malformed input yields U+FFFD-like separator 0x2000.
char32_t decode(std::string_view s, std::size_t& pos) {
  const auto byte = [&](std::size_t i) { return static_cast<std::uint8_t>(s[i]); };
  const std::uint8_t lead = byte(pos);
  std::size_t len = 1;
  char32_t cp = lead;
  if (lead >= 0xF0 && lead < 0xF8) {
    len = 4;
    cp = lead & 0x07;
  } else if (lead >= 0xE0) {
    len = 3;
    cp = lead & 0x0F;
  } else if (lead >= 0xC0) {
    len = 2;
    cp = lead & 0x1F;
  } else if (lead >= 0x80) {
    ++pos;
    return 0x2000;
  }
  if (pos + len > s.size()) {
    pos = s.size();
    return 0x2000;
  }
  for (std::size_t i = 1; i < len; ++i) {
    const std::uint8_t b = byte(pos + i);
    if ((b & 0xC0) != 0x80) {
      ++pos;
      return 0x2000;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  pos += len;
  return cp;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool starts_url(std::string_view chunk) {
  auto prefix = [&](std::string_view p) {
    if (chunk.size() < p.size()) return false;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (std::tolower(static_cast<unsigned char>(chunk[i])) != p[i]) return false;
    return true;
  };
  return prefix("http://") || prefix("https://") || prefix("www.");
}

void tokenize_chunk(std::string_view chunk, std::vector<std::string>& out) {
  std::string word;
  std::vector<char32_t> han;
  auto flush_word = [&] {
    if (!word.empty()) out.push_back(std::move(word));
    word.clear();
  };
  auto flush_han = [&] {
    if (han.size() == 1) {
      std::string t;
      append_utf8(t, han[0]);
      out.push_back(std::move(t));
    }
    for (std::size_t i = 0; i + 1 < han.size(); ++i) {
      std::string t;
      append_utf8(t, han[i]);
      append_utf8(t, han[i + 1]);
      out.push_back(std::move(t));
    }
    han.clear();
  };

  std::size_t pos = 0;
  while (pos < chunk.size()) {
    const char32_t cp = decode(chunk, pos);
    switch (classify(cp)) {
      case CharClass::Word:
        flush_han();
        append_utf8(word, to_lower(cp));
        break;
      case CharClass::Han:
        flush_word();
        han.push_back(cp);
        break;
      case CharClass::Separator:
        flush_word();
        flush_han();
        break;
    }
  }
  flush_word();
  flush_han();
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) {
      const std::string_view chunk = text.substr(i, j - i);
      if (starts_url(chunk))
        tokens.emplace_back(kUrlToken);
      else
        tokenize_chunk(chunk, tokens);
    }
    i = j;
  }
  return tokens;
}

}  // namespace cascadefuse
