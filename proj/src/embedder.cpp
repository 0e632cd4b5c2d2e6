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

#include "medpir/embedder.hpp"

#include <cmath>

#include "medpir/layers.hpp"
#include "medpir/rng.hpp"

namespace medpir {

EmbedderKind embedder_kind_from_string(const std::string& s) {
  if (s == "hash_deterministic") return EmbedderKind::kHashDeterministic;
  if (s == "tiny_transformer_pooled") return EmbedderKind::kTinyTransformerPooled;
  throw ConfigError("unknown embedder kind: " + s);
}

std::string to_string(EmbedderKind k) {
  return k == EmbedderKind::kHashDeterministic ? "hash_deterministic"
                                               : "tiny_transformer_pooled";
}

void EmbedderSpec::validate() const {
  if (d_emb <= 0) throw ConfigError("embedder: d_emb must be positive");
  if (kind == EmbedderKind::kHashDeterministic && trainable) {
    throw ConfigError("embedder: hash_deterministic is never trainable");
  }
  if (kind == EmbedderKind::kTinyTransformerPooled) {
    if (n_layers <= 0 || n_heads <= 0 || d_emb % n_heads != 0) {
      throw ConfigError("embedder: invalid tiny transformer dimensions");
    }
  }
}

Embedding hash_embed(const Tokens& tokens, int d_emb) {
  if (d_emb <= 0) throw ConfigError("hash_embed: d_emb must be positive");
  Embedding v = Embedding::Zero(d_emb);
  if (tokens.empty()) {
    // Reserved zero-free constant for degenerate input.
    v.setConstant(1.0 / std::sqrt(static_cast<double>(d_emb)));
    return v;
  }
  for (size_t p = 0; p < tokens.size(); ++p) {
    uint64_t h = hash_label(tokens[p]);
    Rng stream = make_rng(h, "hash_embed", static_cast<uint64_t>(p));
    for (int j = 0; j < d_emb; ++j) {
      v(j) += stream.uniform() * 2.0 - 1.0;
    }
  }
  return v;
}

double cosine(const Embedding& a, const Embedding& b) {
  if (a.size() != b.size()) throw Error("cosine: dimension mismatch");
  double na = a.norm();
  double nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    throw NumericalError("cosine: undefined similarity for a zero vector");
  }
  return a.dot(b) / (na * nb);
}

SentenceEmbedder::SentenceEmbedder(EmbedderSpec spec) : spec_(spec) {
  spec_.validate();
  if (spec_.kind != EmbedderKind::kHashDeterministic) {
    throw ConfigError("embedder: transformer flavour needs a vocab and parameter store");
  }
}

SentenceEmbedder::SentenceEmbedder(EmbedderSpec spec, const Vocab* vocab,
                                   ParamStore<double>* ps, std::string prefix)
    : spec_(spec), vocab_(vocab), ps_(ps), prefix_(std::move(prefix)) {
  spec_.validate();
  if (spec_.kind == EmbedderKind::kTinyTransformerPooled) {
    if (!vocab_ || !ps_) throw ConfigError("embedder: missing vocab or parameter store");
    nn::EncoderDims dims{spec_.d_emb, spec_.n_layers, spec_.n_heads, spec_.max_len,
                         vocab_->size()};
    nn::declare_encoder_params(*ps_, prefix_, dims);
  }
}

Embedding SentenceEmbedder::embed(const Tokens& tokens) const {
  if (spec_.kind == EmbedderKind::kHashDeterministic) {
    return hash_embed(tokens, spec_.d_emb);
  }
  if (tokens.empty()) {
    Embedding v(spec_.d_emb);
    v.setConstant(1.0 / std::sqrt(static_cast<double>(spec_.d_emb)));
    return v;
  }
  std::vector<int> ids = vocab_->encode(tokens);
  if (static_cast<int>(ids.size()) > spec_.max_len) {
    ids.resize(static_cast<size_t>(spec_.max_len));
  }
  nn::EncoderDims dims{spec_.d_emb, spec_.n_layers, spec_.n_heads, spec_.max_len,
                       vocab_->size()};
  ag::Graph<double> g(ps_, /*grad_enabled=*/false);
  ag::Var<double> enc = nn::transformer_encoder(g, *ps_, prefix_, ids, dims);
  ag::Var<double> pooled = ag::mean_rows(enc);
  return pooled.value().row(0).transpose();
}

}  // namespace medpir
