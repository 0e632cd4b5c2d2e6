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

#include "medpir/text.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "medpir/common.hpp"

namespace medpir {

Tokens tokenize(const std::string& text) {
  Tokens out;
  std::string run;
  auto flush = [&] {
    if (!run.empty()) {
      out.push_back(run);
      run.clear();
    }
  };
  size_t i = 0;
  while (i < text.size()) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (c < 0x80) {
      if (std::isspace(c)) {
        flush();
      } else {
        run.push_back(static_cast<char>(c));
      }
      ++i;
    } else {
      flush();
      // UTF-8 sequence length from the lead byte; tolerate truncation.
      size_t len = (c >= 0xf0) ? 4 : (c >= 0xe0) ? 3 : 2;
      len = std::min(len, text.size() - i);
      out.push_back(text.substr(i, len));
      i += len;
    }
  }
  flush();
  return out;
}

std::string detokenize(const Tokens& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

namespace {
const char* kSpecialNames[kNumSpecialTokens] = {
    "[PAD]", "[BOS]", "[EOS]", "[SEP]", "[UNK]", "[PAT]", "[DOC]"};
}

Vocab::Vocab() {
  for (int i = 0; i < kNumSpecialTokens; ++i) {
    tokens_.emplace_back(kSpecialNames[i]);
    index_.emplace(tokens_.back(), i);
  }
}

Vocab Vocab::build(const std::vector<Tokens>& texts, int max_size) {
  if (max_size < kNumSpecialTokens) {
    throw ConfigError("vocab max_size smaller than the special-token inventory");
  }
  std::map<std::string, int64_t> counts;  // ordered, for the lexicographic tie-break
  for (const auto& toks : texts) {
    for (const auto& t : toks) ++counts[t];
  }
  std::vector<std::pair<std::string, int64_t>> items(counts.begin(), counts.end());
  std::stable_sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocab v;
  for (const auto& [tok, cnt] : items) {
    if (v.size() >= max_size) break;
    if (v.index_.count(tok)) continue;  // token spelled like a special
    v.index_.emplace(tok, v.size());
    v.tokens_.push_back(tok);
  }
  return v;
}

int Vocab::id(const std::string& token) const {
  auto it = index_.find(token);
  return it == index_.end() ? kUnk : it->second;
}

const std::string& Vocab::token(int id) const {
  if (id < 0 || id >= size()) throw Error("vocab: token id out of range");
  return tokens_[static_cast<size_t>(id)];
}

std::vector<int> Vocab::encode(const Tokens& tokens) const {
  std::vector<int> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

Tokens Vocab::decode(const std::vector<int>& ids) const {
  Tokens out;
  for (int i : ids) {
    if (i == kPad || i == kBos || i == kEos) continue;
    out.push_back(token(i));
  }
  return out;
}

Vocab Vocab::from_entries(const std::vector<std::string>& entries) {
  if (entries.size() < kNumSpecialTokens) throw ParseError("vocab entries: missing specials");
  for (int i = 0; i < kNumSpecialTokens; ++i) {
    if (entries[static_cast<size_t>(i)] != kSpecialNames[i]) {
      throw ParseError("vocab entries: special tokens out of order");
    }
  }
  Vocab v;
  for (size_t i = kNumSpecialTokens; i < entries.size(); ++i) {
    v.index_.emplace(entries[i], v.size());
    v.tokens_.push_back(entries[i]);
  }
  return v;
}

}  // namespace medpir
