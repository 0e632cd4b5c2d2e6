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

#ifndef MEDPIR_LAYERS_HPP_
#define MEDPIR_LAYERS_HPP_

#include <string>
#include <vector>

#include "medpir/autograd.hpp"
#include "medpir/params.hpp"

namespace medpir {
namespace nn {

using ag::Var;

// y = x W + b. Creates "<prefix>.w" and "<prefix>.b" on first use.
template <typename S>
Var<S> linear(ag::Graph<S>& g, ParamStore<S>& ps, Var<S> x, const std::string& prefix,
              Index out_dim, Init w_init = Init::kXavier) {
  ps.ensure(prefix + ".w", x.cols(), out_dim, w_init);
  ps.ensure(prefix + ".b", 1, out_dim, Init::kZero);
  return ag::add_row_broadcast(ag::matmul(x, g.param(prefix + ".w")), g.param(prefix + ".b"));
}

template <typename S>
Var<S> layer_norm_p(ag::Graph<S>& g, ParamStore<S>& ps, Var<S> x, const std::string& prefix) {
  ps.ensure(prefix + ".g", 1, x.cols(), Init::kOne);
  ps.ensure(prefix + ".b", 1, x.cols(), Init::kZero);
  return ag::layer_norm(x, g.param(prefix + ".g"), g.param(prefix + ".b"));
}

// Scaled dot-product multi-head attention. q_in: (Tq x d), kv_in: (Tk x d).
// causal restricts row t to key positions 0..t (requires Tq == Tk).
template <typename S>
Var<S> multihead_attention(ag::Graph<S>& g, ParamStore<S>& ps, const std::string& prefix,
                           Var<S> q_in, Var<S> kv_in, int n_heads, bool causal) {
  Index d = q_in.cols();
  if (d % n_heads != 0) throw ConfigError("attention: d_model not divisible by n_heads");
  Index dh = d / n_heads;
  Var<S> q = linear(g, ps, q_in, prefix + ".q", d);
  Var<S> k = linear(g, ps, kv_in, prefix + ".k", d);
  Var<S> v = linear(g, ps, kv_in, prefix + ".v", d);
  const S inv_sqrt = S(1) / std::sqrt(static_cast<S>(dh));
  std::vector<Var<S>> heads;
  heads.reserve(static_cast<size_t>(n_heads));
  for (int h = 0; h < n_heads; ++h) {
    Var<S> qh = ag::slice_cols(q, h * dh, dh);
    Var<S> kh = ag::slice_cols(k, h * dh, dh);
    Var<S> vh = ag::slice_cols(v, h * dh, dh);
    Var<S> scores = ag::scale(ag::matmul(qh, ag::transpose(kh)), inv_sqrt);
    Var<S> attn = causal ? ag::causal_row_softmax(scores) : ag::row_softmax(scores);
    heads.push_back(ag::matmul(attn, vh));
  }
  Var<S> merged = n_heads == 1 ? heads[0] : ag::concat_cols(heads);
  return linear(g, ps, merged, prefix + ".o", d);
}

template <typename S>
Var<S> feed_forward(ag::Graph<S>& g, ParamStore<S>& ps, const std::string& prefix, Var<S> x,
                    Index d_ff) {
  Var<S> h = ag::gelu(linear(g, ps, x, prefix + ".in", d_ff));
  return linear(g, ps, h, prefix + ".out", x.cols());
}

// Pre-norm residual block: zeroing the attention and FFN output projections
// makes the block an exact identity.
template <typename S>
Var<S> encoder_block(ag::Graph<S>& g, ParamStore<S>& ps, const std::string& prefix, Var<S> x,
                     int n_heads, Index d_ff) {
  Var<S> xn = layer_norm_p(g, ps, x, prefix + ".ln1");
  x = ag::add(x, multihead_attention(g, ps, prefix + ".attn", xn, xn, n_heads, false));
  Var<S> xn2 = layer_norm_p(g, ps, x, prefix + ".ln2");
  return ag::add(x, feed_forward(g, ps, prefix + ".ffn", xn2, d_ff));
}

struct EncoderDims {
  int d_model = 64;
  int n_layers = 2;
  int n_heads = 4;
  int max_len = 256;
  int vocab_size = 0;
  Index d_ff() const { return 4 * d_model; }
};

// Declares every tensor of a token encoder up front so checkpoints have a
// stable inventory regardless of which inputs a run happens to see.
template <typename S>
void declare_encoder_params(ParamStore<S>& ps, const std::string& prefix,
                            const EncoderDims& dims) {
  ps.ensure(prefix + ".tok_emb", dims.vocab_size, dims.d_model, Init::kNormal);
  ps.ensure(prefix + ".pos_emb", dims.max_len, dims.d_model, Init::kNormal);
  Index d = dims.d_model;
  for (int l = 0; l < dims.n_layers; ++l) {
    std::string lp = prefix + ".l" + std::to_string(l);
    ps.ensure(lp + ".ln1.g", 1, d, Init::kOne);
    ps.ensure(lp + ".ln1.b", 1, d, Init::kZero);
    ps.ensure(lp + ".ln2.g", 1, d, Init::kOne);
    ps.ensure(lp + ".ln2.b", 1, d, Init::kZero);
    for (const char* m : {".attn.q", ".attn.k", ".attn.v", ".attn.o"}) {
      ps.ensure(lp + m + ".w", d, d, Init::kXavier);
      ps.ensure(lp + m + ".b", 1, d, Init::kZero);
    }
    ps.ensure(lp + ".ffn.in.w", d, dims.d_ff(), Init::kXavier);
    ps.ensure(lp + ".ffn.in.b", 1, dims.d_ff(), Init::kZero);
    ps.ensure(lp + ".ffn.out.w", dims.d_ff(), d, Init::kXavier);
    ps.ensure(lp + ".ffn.out.b", 1, d, Init::kZero);
  }
}

// Token + learned position embeddings.
template <typename S>
Var<S> embed_sequence(ag::Graph<S>& g, ParamStore<S>& ps, const std::string& prefix,
                      const std::vector<int>& ids, const EncoderDims& dims) {
  if (ids.empty()) throw Error("embed_sequence: empty input");
  if (static_cast<int>(ids.size()) > dims.max_len) {
    throw Error("embed_sequence: sequence longer than max_len for " + prefix);
  }
  Var<S> tok = ag::gather_rows(g.param(prefix + ".tok_emb"), ids);
  Var<S> pos = ag::slice_rows(g.param(prefix + ".pos_emb"), 0, static_cast<Index>(ids.size()));
  return ag::add(tok, pos);
}

// Bidirectional token-level encoder; no final layer norm, so zero-initialized
// output projections reduce it to embeddings + positions.
template <typename S>
Var<S> transformer_encoder(ag::Graph<S>& g, ParamStore<S>& ps, const std::string& prefix,
                           const std::vector<int>& ids, const EncoderDims& dims) {
  Var<S> x = embed_sequence(g, ps, prefix, ids, dims);
  for (int l = 0; l < dims.n_layers; ++l) {
    x = encoder_block(g, ps, prefix + ".l" + std::to_string(l), x, dims.n_heads, dims.d_ff());
  }
  return x;
}

}  // namespace nn
}  // namespace medpir

#endif  // MEDPIR_LAYERS_HPP_
