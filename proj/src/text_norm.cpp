#include "stanceval/text_norm.hpp"

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include <cctype>
#include <regex>

#include "stanceval/error.hpp"

namespace stanceval {

namespace {

bool is_cjk(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) ||    // CJK unified
         (cp >= 0x3400 && cp <= 0x4DBF) ||    // extension A
         (cp >= 0x20000 && cp <= 0x2A6DF) ||  // extension B
         (cp >= 0xF900 && cp <= 0xFAFF) ||    // compatibility ideographs
         (cp >= 0x3040 && cp <= 0x30FF);      // kana
}

bool is_latin_alnum(char32_t cp) {
  if (cp < 0x80) return std::isalnum(static_cast<int>(cp)) != 0;
  return (cp >= 0xC0 && cp <= 0x24F) && cp != 0xD7 && cp != 0xF7;  // Latin-1 + extended letters
}

bool is_space_cp(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\f' ||
         cp == U'\v' || cp == 0xA0 || cp == 0x3000 || (cp >= 0x2000 && cp <= 0x200A) ||
         cp == 0x2028 || cp == 0x2029 || cp == 0x205F;
}

// Codepoints stripped outright: controls, zero-width/format characters,
// variation selectors, and the emoji/symbol blocks social media text mixes in.
bool is_stripped(char32_t cp) {
  if (cp < 0x20 || (cp >= 0x7F && cp <= 0x9F)) return true;  // controls (whitespace already out)
  if (cp >= 0x200B && cp <= 0x200F) return true;
  if (cp >= 0x202A && cp <= 0x202E) return true;
  if (cp >= 0x2060 && cp <= 0x206F) return true;
  if (cp >= 0xFE00 && cp <= 0xFE0F) return true;  // variation selectors
  if (cp == 0xFEFF || cp == 0xFFFD) return true;
  if (cp == 0x20E3) return true;  // combining keycap
  if (cp >= 0x2190 && cp <= 0x21FF) return true;  // arrows
  if (cp >= 0x2600 && cp <= 0x27BF) return true;  // misc symbols, dingbats
  if (cp >= 0x2B00 && cp <= 0x2BFF) return true;  // misc symbols and arrows
  if (cp >= 0x1F000 && cp <= 0x1FAFF) return true;  // emoji planes
  return false;
}

bool is_mention_char(char32_t cp) { return is_latin_alnum(cp) || cp == U'_' || cp == U'-' || is_cjk(cp); }

std::string nfkc(std::string_view raw) {
  UErrorCode ec = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFKCInstance(ec);
  if (U_FAILURE(ec)) throw Error("UnicodeInit", "ICU NFKC instance unavailable");
  icu::UnicodeString in = icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
  icu::UnicodeString out = norm->normalize(in, ec);
  if (U_FAILURE(ec)) throw Error("UnicodeNormalize", "NFKC normalization failed");
  std::string result;
  out.toUTF8String(result);
  return result;
}

const std::regex kUrlRe(R"((https?|ftp)://[^\s]+|www\.[^\s]+)", std::regex::icase);

}  // namespace

std::vector<char32_t> decode_utf8(std::string_view s) {
  std::vector<char32_t> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const unsigned char b0 = static_cast<unsigned char>(s[i]);
    char32_t cp = 0xFFFD;
    std::size_t len = 1;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 >> 5) == 0x6 && i + 1 < s.size()) {
      cp = (char32_t{b0} & 0x1F) << 6 | (static_cast<unsigned char>(s[i + 1]) & 0x3F);
      len = 2;
    } else if ((b0 >> 4) == 0xE && i + 2 < s.size()) {
      cp = (char32_t{b0} & 0x0F) << 12 |
           (char32_t{static_cast<unsigned char>(s[i + 1])} & 0x3F) << 6 |
           (static_cast<unsigned char>(s[i + 2]) & 0x3F);
      len = 3;
    } else if ((b0 >> 3) == 0x1E && i + 3 < s.size()) {
      cp = (char32_t{b0} & 0x07) << 18 |
           (char32_t{static_cast<unsigned char>(s[i + 1])} & 0x3F) << 12 |
           (char32_t{static_cast<unsigned char>(s[i + 2])} & 0x3F) << 6 |
           (static_cast<unsigned char>(s[i + 3]) & 0x3F);
      len = 4;
    }
    out.push_back(cp);
    i += len;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
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

std::string encode_utf8(const std::vector<char32_t>& cps) {
  std::string out;
  out.reserve(cps.size() * 3);
  for (char32_t cp : cps) append_utf8(out, cp);
  return out;
}

std::string normalize_text(std::string_view raw) {
  std::string text = nfkc(raw);
  text = std::regex_replace(text, kUrlRe, " ");

  const std::vector<char32_t> cps = decode_utf8(text);
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  std::size_t i = 0;
  while (i < cps.size()) {
    const char32_t cp = cps[i];
    if (cp == U'@') {  // mention: @ plus the following name run
      std::size_t j = i + 1;
      while (j < cps.size() && is_mention_char(cps[j])) ++j;
      i = j;
      pending_space = !out.empty();
      continue;
    }
    if (is_space_cp(cp)) {
      pending_space = !out.empty();
      ++i;
      continue;
    }
    if (is_stripped(cp)) {
      ++i;
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    append_utf8(out, cp);
    ++i;
  }
  return out;
}

TokenSeq tokenize(std::string_view normalized_text, Granularity g) {
  TokenSeq seq;
  seq.granularity = g;
  const std::vector<char32_t> cps = decode_utf8(normalized_text);
  std::string run;
  auto flush_run = [&] {
    if (!run.empty()) {
      seq.tokens.push_back(run);
      run.clear();
    }
  };
  for (char32_t cp : cps) {
    if (is_space_cp(cp)) {
      flush_run();
      continue;
    }
    char32_t lowered = cp;
    if (cp < 0x80 && std::isupper(static_cast<int>(cp))) lowered = cp + 32;
    if (g == Granularity::mixed && is_latin_alnum(cp)) {
      append_utf8(run, lowered);
      continue;
    }
    flush_run();
    std::string tok;
    append_utf8(tok, lowered);
    seq.tokens.push_back(std::move(tok));
  }
  flush_run();
  return seq;
}

Granularity parse_granularity(std::string_view name) {
  if (name == "mixed") return Granularity::mixed;
  if (name == "char" || name == "chars") return Granularity::chars;
  throw Error("BadArgument", "unknown tokenization granularity: " + std::string(name));
}

std::string to_string(Granularity g) { return g == Granularity::mixed ? "mixed" : "char"; }

}  // namespace stanceval
