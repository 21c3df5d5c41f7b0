#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace stanceval {

enum class Granularity { mixed, chars };

Granularity parse_granularity(std::string_view name);  // "mixed" | "char"
std::string to_string(Granularity g);

struct TokenSeq {
  std::vector<std::string> tokens;
  Granularity granularity = Granularity::mixed;

  bool empty() const { return tokens.empty(); }
  std::size_t size() const { return tokens.size(); }
};

// NFKC normalization, then removal of URLs, @-mentions, emoji/symbol
// codepoints and controls, then whitespace collapsed to single spaces.
// Plain CJK and Latin text passes through unchanged.
std::string normalize_text(std::string_view raw);

// mixed: one token per CJK/other codepoint, contiguous Latin/digit runs kept
// whole; chars: one token per codepoint. ASCII letters are lowercased in
// both modes. Whitespace separates tokens and is dropped.
TokenSeq tokenize(std::string_view normalized_text, Granularity g = Granularity::mixed);

// UTF-8 helpers shared by normalization, tokenization and annotation parsing.
// Invalid bytes decode to U+FFFD (one per offending byte).
std::vector<char32_t> decode_utf8(std::string_view s);
void append_utf8(std::string& out, char32_t cp);
std::string encode_utf8(const std::vector<char32_t>& cps);

}  // namespace stanceval
