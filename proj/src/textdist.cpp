// Copyright 2026 The cddted Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cddted/textdist.hpp"

#include <algorithm>
#include <charconv>
#include <limits>

#include "cddted/errors.hpp"

namespace cddted {
namespace {

constexpr std::uint64_t kFnvOffset = 14695981039346656037ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

TokenId HashPiece(std::string_view piece) {
  std::uint64_t h = kFnvOffset;
  for (unsigned char c : piece) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

// Decodes one UTF-8 code point starting at `pos`. On malformed input the
// single byte is consumed and returned as-is with `valid` cleared.
struct CodePoint {
  char32_t value;
  std::size_t length;
  bool valid;
};

CodePoint DecodeAt(std::string_view s, std::size_t pos) {
  const auto lead = static_cast<unsigned char>(s[pos]);
  std::size_t len = 0;
  char32_t cp = 0;
  if (lead < 0x80) return {lead, 1, true};
  if ((lead & 0xE0) == 0xC0) {
    len = 2;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    len = 3;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    len = 4;
    cp = lead & 0x07;
  } else {
    return {lead, 1, false};
  }
  if (pos + len > s.size()) return {lead, 1, false};
  for (std::size_t k = 1; k < len; ++k) {
    const auto c = static_cast<unsigned char>(s[pos + k]);
    if ((c & 0xC0) != 0x80) return {lead, 1, false};
    cp = (cp << 6) | (c & 0x3F);
  }
  return {cp, len, true};
}

bool IsUnicodeSpace(char32_t c) {
  switch (c) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return c >= 0x2000 && c <= 0x200A;
  }
}

bool IsPunct(char32_t c) {
  if (c < 0x80) {
    return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) ||
           (c >= 0x5B && c <= 0x60) || (c >= 0x7B && c <= 0x7E);
  }
  // Latin-1 punctuation and symbols, General Punctuation, CJK symbols and
  // punctuation, fullwidth ASCII punctuation.
  if (c >= 0xA1 && c <= 0xBF) return true;
  if (c == 0xD7 || c == 0xF7) return true;
  if (c >= 0x2010 && c <= 0x2027) return true;
  if (c >= 0x2030 && c <= 0x205E) return true;
  if (c >= 0x3001 && c <= 0x303F) return true;
  if ((c >= 0xFF01 && c <= 0xFF0F) || (c >= 0xFF1A && c <= 0xFF20) ||
      (c >= 0xFF3B && c <= 0xFF40) || (c >= 0xFF5B && c <= 0xFF65)) {
    return true;
  }
  return false;
}

std::vector<TokenId> ParseIds(std::string_view text) {
  std::vector<TokenId> ids;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() &&
           (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\n' ||
            text[pos] == '\r')) {
      ++pos;
    }
    if (pos == text.size()) break;
    TokenId id = 0;
    const char* first = text.data() + pos;
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, id);
    if (ec != std::errc() ||
        (ptr != last && *ptr != ' ' && *ptr != '\t' && *ptr != '\n' &&
         *ptr != '\r')) {
      throw ValidationError("pretokenized text holds a non-integer token at "
                            "offset " + std::to_string(pos));
    }
    ids.push_back(id);
    pos = static_cast<std::size_t>(ptr - text.data());
  }
  return ids;
}

}  // namespace

Tokenizer Tokenizer::WhitespacePunct() {
  return {"whitespace-punct", TokenizerMode::kWhitespacePunct};
}
Tokenizer Tokenizer::ByteLevel() {
  return {"byte-level", TokenizerMode::kByteLevel};
}
Tokenizer Tokenizer::Pretokenized() {
  return {"pretokenized", TokenizerMode::kPretokenized};
}

Tokenizer Tokenizer::FromName(std::string_view name) {
  if (name == "whitespace-punct") return WhitespacePunct();
  if (name == "byte-level") return ByteLevel();
  if (name == "pretokenized" || name == "external-pretokenized") {
    return Pretokenized();
  }
  throw ValidationError("unknown tokenizer '" + std::string(name) + "'", 0,
                        "tokenizer");
}

std::string_view TokenizerModeName(TokenizerMode mode) {
  switch (mode) {
    case TokenizerMode::kWhitespacePunct: return "whitespace-punct";
    case TokenizerMode::kByteLevel: return "byte-level";
    case TokenizerMode::kPretokenized: return "pretokenized";
  }
  return "unknown";
}

std::vector<std::string> SplitWhitespacePunct(std::string_view text) {
  std::vector<std::string> pieces;
  std::string word;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const CodePoint cp = DecodeAt(text, pos);
    const std::string_view raw = text.substr(pos, cp.length);
    pos += cp.length;
    if (cp.valid && IsUnicodeSpace(cp.value)) {
      if (!word.empty()) pieces.push_back(std::move(word));
      word.clear();
    } else if (cp.valid && IsPunct(cp.value)) {
      if (!word.empty()) pieces.push_back(std::move(word));
      word.clear();
      pieces.emplace_back(raw);
    } else {
      word.append(raw);
    }
  }
  if (!word.empty()) pieces.push_back(std::move(word));
  return pieces;
}

TokenSeq Tokenize(std::string_view text, const Tokenizer& tokenizer) {
  TokenSeq seq;
  seq.tokenizer_id = tokenizer.id;
  switch (tokenizer.mode) {
    case TokenizerMode::kWhitespacePunct:
      for (const auto& piece : SplitWhitespacePunct(text)) {
        seq.tokens.push_back(HashPiece(piece));
      }
      break;
    case TokenizerMode::kByteLevel:
      seq.tokens.reserve(text.size());
      for (unsigned char c : text) seq.tokens.push_back(c);
      break;
    case TokenizerMode::kPretokenized:
      seq.tokens = ParseIds(text);
      break;
  }
  return seq;
}

std::size_t EditDistance(std::span<const TokenId> a,
                         std::span<const TokenId> b) {
  while (!a.empty() && !b.empty() && a.front() == b.front()) {
    a = a.subspan(1);
    b = b.subspan(1);
  }
  while (!a.empty() && !b.empty() && a.back() == b.back()) {
    a = a.first(a.size() - 1);
    b = b.first(b.size() - 1);
  }
  if (a.size() < b.size()) std::swap(a, b);
  // b is the shorter one; `row` spans it.
  const std::size_t n = b.size();
  if (n == 0) return a.size();

  std::vector<std::size_t> row(n + 1);
  for (std::size_t j = 0; j <= n; ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= n; ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({sub, up + 1, row[j - 1] + 1});
      diag = up;
    }
  }
  return row[n];
}

std::size_t EditDistance(const TokenSeq& a, const TokenSeq& b) {
  if (a.tokenizer_id != b.tokenizer_id) {
    throw TokenizerMismatchError("cannot compare tokens from '" +
                                 a.tokenizer_id + "' with '" +
                                 b.tokenizer_id + "'");
  }
  return EditDistance(std::span<const TokenId>(a.tokens),
                      std::span<const TokenId>(b.tokens));
}

std::optional<std::size_t> EditDistanceBounded(std::span<const TokenId> a,
                                               std::span<const TokenId> b,
                                               std::size_t bound) {
  const std::size_t longer = std::max(a.size(), b.size());
  const std::size_t gap = longer - std::min(a.size(), b.size());
  if (gap > bound) return std::nullopt;
  if (bound >= longer) return EditDistance(a, b);

  if (a.size() < b.size()) std::swap(a, b);
  const std::size_t m = a.size();
  const std::size_t n = b.size();
  const std::size_t inf = bound + 1;

  std::vector<std::size_t> prev(n + 1, inf);
  std::vector<std::size_t> cur(n + 1, inf);
  for (std::size_t j = 0; j <= std::min(n, bound); ++j) prev[j] = j;

  for (std::size_t i = 1; i <= m; ++i) {
    const std::size_t lo = i > bound ? i - bound : 1;
    const std::size_t hi = std::min(n, i + bound);
    // The band shifts right by one per row; the cell just left of it may
    // hold a value from two rows back.
    cur[lo - 1] = (lo == 1) ? std::min(i, inf) : inf;
    std::size_t row_min = cur[lo - 1];
    for (std::size_t j = lo; j <= hi; ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      const std::size_t v = std::min({sub, prev[j] + 1, cur[j - 1] + 1, inf});
      cur[j] = v;
      row_min = std::min(row_min, v);
    }
    if (row_min > bound) return std::nullopt;
    std::swap(prev, cur);
  }
  if (prev[n] > bound) return std::nullopt;
  return prev[n];
}

std::optional<std::size_t> EditDistanceBounded(const TokenSeq& a,
                                               const TokenSeq& b,
                                               std::size_t bound) {
  if (a.tokenizer_id != b.tokenizer_id) {
    throw TokenizerMismatchError("cannot compare tokens from '" +
                                 a.tokenizer_id + "' with '" +
                                 b.tokenizer_id + "'");
  }
  return EditDistanceBounded(std::span<const TokenId>(a.tokens),
                             std::span<const TokenId>(b.tokens), bound);
}

}  // namespace cddted
