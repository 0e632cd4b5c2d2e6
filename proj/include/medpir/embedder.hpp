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

#ifndef MEDPIR_EMBEDDER_HPP_
#define MEDPIR_EMBEDDER_HPP_

#include <memory>
#include <string>

#include "medpir/common.hpp"
#include "medpir/params.hpp"
#include "medpir/text.hpp"

namespace medpir {

using Embedding = Eigen::VectorXd;

enum class EmbedderKind { kHashDeterministic, kTinyTransformerPooled };

EmbedderKind embedder_kind_from_string(const std::string& s);
std::string to_string(EmbedderKind k);

// Stand-in for a frozen pretrained sentence encoder. hash_deterministic is a
// fixed mixing function and can never be trainable.
struct EmbedderSpec {
  EmbedderKind kind = EmbedderKind::kHashDeterministic;
  int d_emb = 64;
  bool trainable = false;
  int n_layers = 1;  // tiny_transformer_pooled only
  int n_heads = 2;
  int max_len = 128;

  void validate() const;
};

// Position-sensitive token mixing: each (token, position) pair contributes a
// pseudo-random unit-scale vector derived from its hash. Empty input maps to
// a reserved zero-free constant vector.
Embedding hash_embed(const Tokens& tokens, int d_emb);

// Standard cosine similarity; throws NumericalError on a zero vector.
double cosine(const Embedding& a, const Embedding& b);

// Uniform facade over both embedder kinds. The transformer flavour reads its
// parameters from `ps` under `prefix` (mean-pooled token encodings), sharing
// the run vocabulary.
class SentenceEmbedder {
 public:
  explicit SentenceEmbedder(EmbedderSpec spec);  // hash_deterministic
  SentenceEmbedder(EmbedderSpec spec, const Vocab* vocab, ParamStore<double>* ps,
                   std::string prefix);

  Embedding embed(const Tokens& tokens) const;
  const EmbedderSpec& spec() const { return spec_; }

 private:
  EmbedderSpec spec_;
  const Vocab* vocab_ = nullptr;
  ParamStore<double>* ps_ = nullptr;
  std::string prefix_;
};

}  // namespace medpir

#endif  // MEDPIR_EMBEDDER_HPP_
