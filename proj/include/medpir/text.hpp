// Copyright 2026 The medpir Authors
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

#ifndef MEDPIR_TEXT_HPP_
#define MEDPIR_TEXT_HPP_

#include <string>
#include <unordered_map>
#include <vector>

namespace medpir {

using Tokens = std::vector<std::string>;

// Character-level tokens for non-ASCII text (each multi-byte UTF-8 codepoint
// is its own token, which covers CJK ideographs and punctuation alike);
// whitespace-split tokens for ASCII runs.
Tokens tokenize(const std::string& text);

// Inverse of tokenize up to whitespace: tokens joined by single spaces.
// tokenize(detokenize(t)) == t for any tokenize() output.
std::string detokenize(const Tokens& tokens);

// Fixed special-token inventory. Ids 0..6 are reserved in every vocabulary.
enum SpecialToken : int {
  kPad = 0,
  kBos = 1,
  kEos = 2,
  kSep = 3,
  kUnk = 4,
  kSpkPatient = 5,
  kSpkDoctor = 6,
};
inline constexpr int kNumSpecialTokens = 7;

class Vocab {
 public:
  Vocab();  // specials only

  // Deterministic build: tokens ordered by (count desc, token asc), capped at
  // max_size total entries (including the specials).
  static Vocab build(const std::vector<Tokens>& texts, int max_size);

  int id(const std::string& token) const;  // kUnk for OOV
  const std::string& token(int id) const;
  int size() const { return static_cast<int>(tokens_.size()); }

  std::vector<int> encode(const Tokens& tokens) const;
  Tokens decode(const std::vector<int>& ids) const;  // skips PAD/BOS/EOS

  const std::vector<std::string>& entries() const { return tokens_; }
  static Vocab from_entries(const std::vector<std::string>& entries);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace medpir

#endif  // MEDPIR_TEXT_HPP_
