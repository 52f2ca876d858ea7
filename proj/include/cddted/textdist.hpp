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

// Tokenization and token-level edit distance.

#ifndef CDDTED_TEXTDIST_HPP_
#define CDDTED_TEXTDIST_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cddted {

using TokenId = std::uint64_t;

enum class TokenizerMode {
  kWhitespacePunct,
  kByteLevel,
  // Text already holds whitespace-separated integer token ids.
  kPretokenized,
};

struct Tokenizer {
  std::string id;
  TokenizerMode mode = TokenizerMode::kWhitespacePunct;

  static Tokenizer WhitespacePunct();
  static Tokenizer ByteLevel();
  static Tokenizer Pretokenized();

  // Accepts "whitespace-punct", "byte-level", "pretokenized" (and the
  // long form "external-pretokenized"). Throws ValidationError otherwise.
  static Tokenizer FromName(std::string_view name);

  friend bool operator==(const Tokenizer&, const Tokenizer&) = default;
};

std::string_view TokenizerModeName(TokenizerMode mode);

struct TokenSeq {
  std::vector<TokenId> tokens;
  std::string tokenizer_id;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  friend bool operator==(const TokenSeq&, const TokenSeq&) = default;
};

// Splits on Unicode whitespace; every punctuation code point becomes its
// own piece. Invalid UTF-8 bytes are kept as single-byte pieces of a word.
std::vector<std::string> SplitWhitespacePunct(std::string_view text);

// Deterministic. Whitespace-punct pieces map to a 64-bit FNV-1a hash of
// their bytes, byte-level yields one id per byte, pretokenized parses ids.
TokenSeq Tokenize(std::string_view text, const Tokenizer& tokenizer);

// Minimum number of token insertions, deletions and substitutions turning
// `a` into `b`. Two-row DP over the shorter sequence.
std::size_t EditDistance(const TokenSeq& a, const TokenSeq& b);
std::size_t EditDistance(std::span<const TokenId> a,
                         std::span<const TokenId> b);

// Exact distance when it is <= bound, std::nullopt (over bound) otherwise.
// Only a diagonal band of width 2*bound+1 is evaluated and the scan stops
// as soon as a full row exceeds the bound.
std::optional<std::size_t> EditDistanceBounded(const TokenSeq& a,
                                               const TokenSeq& b,
                                               std::size_t bound);
std::optional<std::size_t> EditDistanceBounded(std::span<const TokenId> a,
                                               std::span<const TokenId> b,
                                               std::size_t bound);

}  // namespace cddted

#endif  // CDDTED_TEXTDIST_HPP_
