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

#ifndef MEDPIR_AUTOGRAD_HPP_
#define MEDPIR_AUTOGRAD_HPP_

#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "medpir/common.hpp"
#include "medpir/params.hpp"

namespace medpir {
namespace ag {

// Reverse-mode tape over dense Eigen matrices. One Graph per forward pass;
// values live on the tape, gradients are materialized lazily during
// backward() and flushed into the ParamStore afterwards.
template <typename S>
class Graph;

template <typename S>
struct Var {
  Graph<S>* g = nullptr;
  int id = -1;

  const Mat<S>& value() const { return g->node(id).value; }
  const Mat<S>& grad() const { return g->node(id).grad; }
  Index rows() const { return value().rows(); }
  Index cols() const { return value().cols(); }
};

template <typename S>
class Graph {
 public:
  struct Node {
    Mat<S> value;
    Mat<S> grad;  // empty until touched by backward
    bool requires_grad = false;
    std::function<void(Graph&, int)> back;
  };

  explicit Graph(ParamStore<S>* store = nullptr, bool grad_enabled = true)
      : store_(store), grad_enabled_(grad_enabled) {}

  Node& node(int id) { return nodes_[static_cast<size_t>(id)]; }
  const Node& node(int id) const { return nodes_[static_cast<size_t>(id)]; }
  size_t size() const { return nodes_.size(); }
  bool grad_enabled() const { return grad_enabled_; }

  Var<S> emplace(Mat<S> value, bool requires_grad,
                 std::function<void(Graph&, int)> back = nullptr) {
    Node n;
    n.value = std::move(value);
    n.requires_grad = requires_grad && grad_enabled_;
    if (n.requires_grad) n.back = std::move(back);
    nodes_.push_back(std::move(n));
    return Var<S>{this, static_cast<int>(nodes_.size()) - 1};
  }

  Var<S> constant(Mat<S> value) { return emplace(std::move(value), false); }

  Var<S> leaf(Mat<S> value, bool requires_grad = true) {
    return emplace(std::move(value), requires_grad);
  }

  // Memoized leaf for a named parameter from the attached store.
  Var<S> param(const std::string& name) {
    if (!store_) throw Error("autograd: no parameter store attached");
    auto it = param_ids_.find(name);
    if (it != param_ids_.end()) return Var<S>{this, it->second};
    Var<S> v = leaf(store_->value(name), true);
    param_ids_.emplace(name, v.id);
    return v;
  }

  void ensure_grad(int id) {
    Node& n = node(id);
    if (n.grad.size() == 0) n.grad = Mat<S>::Zero(n.value.rows(), n.value.cols());
  }

  // Reverse pass from a scalar (1x1) root.
  void backward(Var<S> root) {
    if (root.g != this) throw Error("autograd: root from another graph");
    const Node& r = node(root.id);
    if (r.value.rows() != 1 || r.value.cols() != 1) {
      throw Error("autograd: backward root must be 1x1");
    }
    ensure_grad(root.id);
    node(root.id).grad(0, 0) = S(1);
    for (int i = root.id; i >= 0; --i) {
      Node& n = node(i);
      if (n.grad.size() != 0 && n.back) n.back(*this, i);
    }
  }

  // Accumulates parameter-leaf gradients into the store.
  void flush_param_grads() {
    if (!store_) return;
    for (const auto& [name, id] : param_ids_) {
      const Node& n = node(id);
      if (n.grad.size() != 0) store_->grad(name) += n.grad;
    }
  }

  int64_t bce_clamp_events = 0;  // diagnostics: clamped BCE inputs

 private:
  std::vector<Node> nodes_;
  ParamStore<S>* store_;
  std::map<std::string, int> param_ids_;
  bool grad_enabled_;
};

namespace detail {

template <typename S>
bool wants_grad(std::initializer_list<Var<S>> parents) {
  for (const Var<S>& p : parents) {
    if (p.g->node(p.id).requires_grad) return true;
  }
  return false;
}

template <typename S>
void check_same_graph(std::initializer_list<Var<S>> vars) {
  const Graph<S>* g = nullptr;
  for (const Var<S>& v : vars) {
    if (!g) g = v.g;
    if (v.g != g) throw Error("autograd: vars belong to different graphs");
  }
}

template <typename S>
void accumulate(Graph<S>& g, int id, const Mat<S>& delta) {
  if (!g.node(id).requires_grad) return;
  g.ensure_grad(id);
  g.node(id).grad += delta;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Elementwise and affine ops

template <typename S>
Var<S> add(Var<S> a, Var<S> b) {
  detail::check_same_graph<S>({a, b});
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error("add: shape mismatch");
  }
  Mat<S> v = a.value() + b.value();
  return a.g->emplace(std::move(v), detail::wants_grad<S>({a, b}),
                      [ai = a.id, bi = b.id](Graph<S>& g, int self) {
                        const Mat<S>& go = g.node(self).grad;
                        detail::accumulate(g, ai, go);
                        detail::accumulate(g, bi, go);
                      });
}

template <typename S>
Var<S> sub(Var<S> a, Var<S> b) {
  detail::check_same_graph<S>({a, b});
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error("sub: shape mismatch");
  }
  Mat<S> v = a.value() - b.value();
  return a.g->emplace(std::move(v), detail::wants_grad<S>({a, b}),
                      [ai = a.id, bi = b.id](Graph<S>& g, int self) {
                        const Mat<S>& go = g.node(self).grad;
                        detail::accumulate(g, ai, go);
                        detail::accumulate<S>(g, bi, -go);
                      });
}

template <typename S>
Var<S> scale(Var<S> a, S c) {
  Mat<S> v = a.value() * c;
  return a.g->emplace(std::move(v), detail::wants_grad<S>({a}),
                      [ai = a.id, c](Graph<S>& g, int self) {
                        detail::accumulate<S>(g, ai, g.node(self).grad * c);
                      });
}

template <typename S>
Var<S> cmul(Var<S> a, Var<S> b) {
  detail::check_same_graph<S>({a, b});
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error("cmul: shape mismatch");
  }
  Mat<S> v = a.value().cwiseProduct(b.value());
  return a.g->emplace(std::move(v), detail::wants_grad<S>({a, b}),
                      [ai = a.id, bi = b.id](Graph<S>& g, int self) {
                        const Mat<S>& go = g.node(self).grad;
                        detail::accumulate<S>(g, ai, go.cwiseProduct(g.node(bi).value));
                        detail::accumulate<S>(g, bi, go.cwiseProduct(g.node(ai).value));
                      });
}

template <typename S>
Var<S> matmul(Var<S> a, Var<S> b) {
  detail::check_same_graph<S>({a, b});
  if (a.cols() != b.rows()) throw Error("matmul: inner dimension mismatch");
  Mat<S> v = a.value() * b.value();
  return a.g->emplace(std::move(v), detail::wants_grad<S>({a, b}),
                      [ai = a.id, bi = b.id](Graph<S>& g, int self) {
                        const Mat<S>& go = g.node(self).grad;
                        detail::accumulate<S>(g, ai, go * g.node(bi).value.transpose());
                        detail::accumulate<S>(g, bi, g.node(ai).value.transpose() * go);
                      });
}

template <typename S>
Var<S> transpose(Var<S> a) {
  Mat<S> v = a.value().transpose();
  return a.g->emplace(std::move(v), detail::wants_grad<S>({a}),
                      [ai = a.id](Graph<S>& g, int self) {
                        detail::accumulate<S>(g, ai, g.node(self).grad.transpose());
                      });
}

// a: (n x d), bias: (1 x d), added to each row.
template <typename S>
Var<S> add_row_broadcast(Var<S> a, Var<S> bias) {
  detail::check_same_graph<S>({a, bias});
  if (bias.rows() != 1 || bias.cols() != a.cols()) {
    throw Error("add_row_broadcast: bias must be 1 x cols(a)");
  }
  Mat<S> v = a.value().rowwise() + bias.value().row(0);
  return a.g->emplace(std::move(v), detail::wants_grad<S>({a, bias}),
                      [ai = a.id, bi = bias.id](Graph<S>& g, int self) {
                        const Mat<S>& go = g.node(self).grad;
                        detail::accumulate(g, ai, go);
                        detail::accumulate<S>(g, bi, go.colwise().sum());
                      });
}

// ---------------------------------------------------------------------------
// Shape ops

template <typename S>
Var<S> concat_rows(const std::vector<Var<S>>& parts) {
  if (parts.empty()) throw Error("concat_rows: empty input");
  Graph<S>* g = parts[0].g;
  Index total = 0;
  Index cols = parts[0].cols();
  bool req = false;
  for (const Var<S>& p : parts) {
    if (p.g != g) throw Error("concat_rows: graphs differ");
    if (p.cols() != cols) throw Error("concat_rows: column mismatch");
    total += p.rows();
    req = req || g->node(p.id).requires_grad;
  }
  Mat<S> v(total, cols);
  Index r = 0;
  std::vector<std::pair<int, Index>> layout;  // (id, rows)
  for (const Var<S>& p : parts) {
    v.middleRows(r, p.rows()) = p.value();
    layout.emplace_back(p.id, p.rows());
    r += p.rows();
  }
  return g->emplace(std::move(v), req, [layout](Graph<S>& g2, int self) {
    const Mat<S>& go = g2.node(self).grad;
    Index r2 = 0;
    for (const auto& [id, n] : layout) {
      detail::accumulate<S>(g2, id, go.middleRows(r2, n));
      r2 += n;
    }
  });
}

template <typename S>
Var<S> concat_cols(const std::vector<Var<S>>& parts) {
  if (parts.empty()) throw Error("concat_cols: empty input");
  Graph<S>* g = parts[0].g;
  Index total = 0;
  Index rows = parts[0].rows();
  bool req = false;
  for (const Var<S>& p : parts) {
    if (p.g != g) throw Error("concat_cols: graphs differ");
    if (p.rows() != rows) throw Error("concat_cols: row mismatch");
    total += p.cols();
    req = req || g->node(p.id).requires_grad;
  }
  Mat<S> v(rows, total);
  Index c = 0;
  std::vector<std::pair<int, Index>> layout;
  for (const Var<S>& p : parts) {
    v.middleCols(c, p.cols()) = p.value();
    layout.emplace_back(p.id, p.cols());
    c += p.cols();
  }
  return g->emplace(std::move(v), req, [layout](Graph<S>& g2, int self) {
    const Mat<S>& go = g2.node(self).grad;
    Index c2 = 0;
    for (const auto& [id, n] : layout) {
      detail::accumulate<S>(g2, id, go.middleCols(c2, n));
      c2 += n;
    }
  });
}

template <typename S>
Var<S> slice_rows(Var<S> a, Index r0, Index n) {
  if (r0 < 0 || n < 0 || r0 + n > a.rows()) throw Error("slice_rows: out of range");
  Mat<S> v = a.value().middleRows(r0, n);
  return a.g->emplace(std::move(v), detail::wants_grad<S>({a}),
                      [ai = a.id, r0, n](Graph<S>& g, int self) {
                        if (!g.node(ai).requires_grad) return;
                        g.ensure_grad(ai);
                        g.node(ai).grad.middleRows(r0, n) += g.node(self).grad;
                      });
}

template <typename S>
Var<S> slice_cols(Var<S> a, Index c0, Index n) {
  if (c0 < 0 || n < 0 || c0 + n > a.cols()) throw Error("slice_cols: out of range");
  Mat<S> v = a.value().middleCols(c0, n);
  return a.g->emplace(std::move(v), detail::wants_grad<S>({a}),
                      [ai = a.id, c0, n](Graph<S>& g, int self) {
                        if (!g.node(ai).requires_grad) return;
                        g.ensure_grad(ai);
                        g.node(ai).grad.middleCols(c0, n) += g.node(self).grad;
                      });
}

// Embedding lookup: out.row(t) = a.row(idx[t]); backward scatter-adds.
template <typename S>
Var<S> gather_rows(Var<S> a, std::vector<int> idx) {
  Mat<S> v(static_cast<Index>(idx.size()), a.cols());
  for (size_t t = 0; t < idx.size(); ++t) {
    if (idx[t] < 0 || idx[t] >= a.rows()) throw Error("gather_rows: index out of range");
    v.row(static_cast<Index>(t)) = a.value().row(idx[t]);
  }
  return a.g->emplace(std::move(v), detail::wants_grad<S>({a}),
                      [ai = a.id, idx = std::move(idx)](Graph<S>& g, int self) {
                        if (!g.node(ai).requires_grad) return;
                        g.ensure_grad(ai);
                        const Mat<S>& go = g.node(self).grad;
                        for (size_t t = 0; t < idx.size(); ++t) {
                          g.node(ai).grad.row(idx[t]) += go.row(static_cast<Index>(t));
                        }
                      });
}

template <typename S>
Var<S> mean_rows(Var<S> a) {
  if (a.rows() == 0) throw Error("mean_rows: empty input");
  Mat<S> v = a.value().colwise().mean();
  return a.g->emplace(std::move(v), detail::wants_grad<S>({a}),
                      [ai = a.id, n = a.rows()](Graph<S>& g, int self) {
                        const Mat<S>& go = g.node(self).grad;
                        Mat<S> da = go.replicate(n, 1) / static_cast<S>(n);
                        detail::accumulate(g, ai, da);
                      });
}

// out.row(i) = s(i, 0) * a.row(i); s is (n x 1).
template <typename S>
Var<S> scale_rows(Var<S> a, Var<S> s) {
  detail::check_same_graph<S>({a, s});
  if (s.cols() != 1 || s.rows() != a.rows()) throw Error("scale_rows: s must be rows(a) x 1");
  Mat<S> v = (a.value().array().colwise() * s.value().col(0).array()).matrix();
  return a.g->emplace(std::move(v), detail::wants_grad<S>({a, s}),
                      [ai = a.id, si = s.id](Graph<S>& g, int self) {
                        const Mat<S>& go = g.node(self).grad;
                        const Mat<S>& av = g.node(ai).value;
                        const Mat<S>& sv = g.node(si).value;
                        Mat<S> da = (go.array().colwise() * sv.col(0).array()).matrix();
                        detail::accumulate(g, ai, da);
                        Mat<S> ds = (go.cwiseProduct(av)).rowwise().sum();
                        detail::accumulate(g, si, ds);
                      });
}

template <typename S>
Var<S> sum_all(Var<S> a) {
  Mat<S> v(1, 1);
  v(0, 0) = a.value().sum();
  return a.g->emplace(std::move(v), detail::wants_grad<S>({a}),
                      [ai = a.id](Graph<S>& g, int self) {
                        S go = g.node(self).grad(0, 0);
                        const Mat<S>& av = g.node(ai).value;
                        detail::accumulate<S>(g, ai,
                                              Mat<S>::Constant(av.rows(), av.cols(), go));
                      });
}

// ---------------------------------------------------------------------------
// Nonlinearities

template <typename S>
Var<S> sigmoid(Var<S> a) {
  Mat<S> v = a.value().unaryExpr([](S x) { return S(1) / (S(1) + std::exp(-x)); });
  return a.g->emplace(std::move(v), detail::wants_grad<S>({a}),
                      [ai = a.id](Graph<S>& g, int self) {
                        const Mat<S>& y = g.node(self).value;
                        Mat<S> da = g.node(self).grad.cwiseProduct(
                            y.cwiseProduct(Mat<S>::Constant(y.rows(), y.cols(), S(1)) - y));
                        detail::accumulate(g, ai, da);
                      });
}

template <typename S>
Var<S> tanh_op(Var<S> a) {
  Mat<S> v = a.value().array().tanh().matrix();
  return a.g->emplace(std::move(v), detail::wants_grad<S>({a}),
                      [ai = a.id](Graph<S>& g, int self) {
                        const Mat<S>& y = g.node(self).value;
                        Mat<S> da =
                            g.node(self).grad.cwiseProduct((1 - y.array().square()).matrix());
                        detail::accumulate(g, ai, da);
                      });
}

namespace detail {
template <typename S>
S gelu_forward(S x) {
  const S c = S(0.7978845608028654);  // sqrt(2/pi)
  S u = c * (x + S(0.044715) * x * x * x);
  return S(0.5) * x * (S(1) + std::tanh(u));
}
template <typename S>
S gelu_backward(S x) {
  const S c = S(0.7978845608028654);
  S u = c * (x + S(0.044715) * x * x * x);
  S t = std::tanh(u);
  S du = c * (S(1) + S(3) * S(0.044715) * x * x);
  return S(0.5) * (S(1) + t) + S(0.5) * x * (S(1) - t * t) * du;
}
}  // namespace detail

// Smooth activation keeps finite-difference checks clean.
template <typename S>
Var<S> gelu(Var<S> a) {
  Mat<S> v = a.value().unaryExpr([](S x) { return detail::gelu_forward(x); });
  return a.g->emplace(std::move(v), detail::wants_grad<S>({a}),
                      [ai = a.id](Graph<S>& g, int self) {
                        const Mat<S>& x = g.node(ai).value;
                        Mat<S> d = x.unaryExpr([](S xv) { return detail::gelu_backward(xv); });
                        detail::accumulate<S>(g, ai, g.node(self).grad.cwiseProduct(d));
                      });
}

template <typename S>
Var<S> elu(Var<S> a, S alpha = S(1)) {
  Mat<S> v = a.value().unaryExpr(
      [alpha](S x) { return x > S(0) ? x : alpha * (std::exp(x) - S(1)); });
  return a.g->emplace(std::move(v), detail::wants_grad<S>({a}),
                      [ai = a.id, alpha](Graph<S>& g, int self) {
                        const Mat<S>& x = g.node(ai).value;
                        Mat<S> d = x.unaryExpr(
                            [alpha](S xv) { return xv > S(0) ? S(1) : alpha * std::exp(xv); });
                        detail::accumulate<S>(g, ai, g.node(self).grad.cwiseProduct(d));
                      });
}

template <typename S>
Var<S> leaky_relu(Var<S> a, S slope = S(0.2)) {
  Mat<S> v = a.value().unaryExpr([slope](S x) { return x > S(0) ? x : slope * x; });
  return a.g->emplace(std::move(v), detail::wants_grad<S>({a}),
                      [ai = a.id, slope](Graph<S>& g, int self) {
                        const Mat<S>& x = g.node(ai).value;
                        Mat<S> d = x.unaryExpr([slope](S xv) { return xv > S(0) ? S(1) : slope; });
                        detail::accumulate<S>(g, ai, g.node(self).grad.cwiseProduct(d));
                      });
}

// ---------------------------------------------------------------------------
// Softmax family

namespace detail {
// Softmax of `row` restricted to `allowed` positions; zeros elsewhere.
template <typename S, typename RowIn, typename RowOut>
void softmax_row(const RowIn& in, const std::vector<char>& allowed, RowOut out) {
  S mx = std::numeric_limits<S>::lowest();
  bool any = false;
  for (Index j = 0; j < in.size(); ++j) {
    if (allowed[static_cast<size_t>(j)]) {
      any = true;
      mx = std::max(mx, in(j));
    }
  }
  if (!any) {
    out.setZero();
    return;
  }
  S denom = S(0);
  for (Index j = 0; j < in.size(); ++j) {
    if (allowed[static_cast<size_t>(j)]) {
      out(j) = std::exp(in(j) - mx);
      denom += out(j);
    } else {
      out(j) = S(0);
    }
  }
  out /= denom;
}

// Shared backward: dx = y .* (g - rowsum(g .* y)); masked entries have y = 0.
template <typename S>
void softmax_backward(Graph<S>& g, int self, int parent) {
  const Mat<S>& y = g.node(self).value;
  const Mat<S>& go = g.node(self).grad;
  Mat<S> dot = (go.cwiseProduct(y)).rowwise().sum();
  Mat<S> dx = y.cwiseProduct(go - dot.replicate(1, y.cols()));
  accumulate(g, parent, dx);
}
}  // namespace detail

template <typename S>
Var<S> row_softmax(Var<S> a) {
  Mat<S> v(a.rows(), a.cols());
  std::vector<char> all(static_cast<size_t>(a.cols()), 1);
  for (Index i = 0; i < a.rows(); ++i) {
    detail::softmax_row<S>(a.value().row(i), all, v.row(i));
  }
  return a.g->emplace(std::move(v), detail::wants_grad<S>({a}),
                      [ai = a.id](Graph<S>& g, int self) {
                        detail::softmax_backward(g, self, ai);
                      });
}

// Square score matrix; row i attends to columns 0..i only. Entries beyond the
// diagonal are exactly zero, so later prefix positions cannot leak backwards.
template <typename S>
Var<S> causal_row_softmax(Var<S> a) {
  if (a.rows() != a.cols()) throw Error("causal_row_softmax: matrix must be square");
  Mat<S> v(a.rows(), a.cols());
  std::vector<char> allowed(static_cast<size_t>(a.cols()), 0);
  for (Index i = 0; i < a.rows(); ++i) {
    allowed[static_cast<size_t>(i)] = 1;
    detail::softmax_row<S>(a.value().row(i), allowed, v.row(i));
  }
  return a.g->emplace(std::move(v), detail::wants_grad<S>({a}),
                      [ai = a.id](Graph<S>& g, int self) {
                        detail::softmax_backward(g, self, ai);
                      });
}

// Boolean adjacency mask (1 = attend). Rows with no allowed entry produce an
// all-zero row instead of NaN, so isolated graph vertices contribute nothing.
template <typename S>
Var<S> masked_row_softmax(Var<S> a, const Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>& mask) {
  if (mask.rows() != a.rows() || mask.cols() != a.cols()) {
    throw Error("masked_row_softmax: mask shape mismatch");
  }
  Mat<S> v(a.rows(), a.cols());
  std::vector<char> allowed(static_cast<size_t>(a.cols()));
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) allowed[static_cast<size_t>(j)] = mask(i, j) ? 1 : 0;
    detail::softmax_row<S>(a.value().row(i), allowed, v.row(i));
  }
  return a.g->emplace(std::move(v), detail::wants_grad<S>({a}),
                      [ai = a.id](Graph<S>& g, int self) {
                        detail::softmax_backward(g, self, ai);
                      });
}

template <typename S>
Var<S> row_log_softmax(Var<S> a) {
  Mat<S> v(a.rows(), a.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    S mx = a.value().row(i).maxCoeff();
    S denom = (a.value().row(i).array() - mx).exp().sum();
    v.row(i) = (a.value().row(i).array() - mx - std::log(denom)).matrix();
  }
  return a.g->emplace(std::move(v), detail::wants_grad<S>({a}),
                      [ai = a.id](Graph<S>& g, int self) {
                        const Mat<S>& logp = g.node(self).value;
                        const Mat<S>& go = g.node(self).grad;
                        Mat<S> soft = logp.array().exp().matrix();
                        Mat<S> rowsum = go.rowwise().sum();
                        Mat<S> dx = go - soft.cwiseProduct(rowsum.replicate(1, logp.cols()));
                        detail::accumulate(g, ai, dx);
                      });
}

// ---------------------------------------------------------------------------
// Normalization and losses

// Row-wise layer normalization with learned gain/bias (both 1 x d).
template <typename S>
Var<S> layer_norm(Var<S> x, Var<S> gain, Var<S> bias, S eps = S(1e-5)) {
  detail::check_same_graph<S>({x, gain, bias});
  if (gain.rows() != 1 || gain.cols() != x.cols() || bias.rows() != 1 ||
      bias.cols() != x.cols()) {
    throw Error("layer_norm: gain/bias must be 1 x cols(x)");
  }
  Index n = x.rows(), d = x.cols();
  Mat<S> xhat(n, d);
  ColVec<S> inv_std(n);
  for (Index i = 0; i < n; ++i) {
    S mu = x.value().row(i).mean();
    S var = (x.value().row(i).array() - mu).square().sum() / static_cast<S>(d);
    inv_std(i) = S(1) / std::sqrt(var + eps);
    xhat.row(i) = ((x.value().row(i).array() - mu) * inv_std(i)).matrix();
  }
  Mat<S> v = ((xhat.array().rowwise() * gain.value().row(0).array()).rowwise() +
              bias.value().row(0).array())
                 .matrix();
  return x.g->emplace(
      std::move(v), detail::wants_grad<S>({x, gain, bias}),
      [xi = x.id, gi = gain.id, bi = bias.id, xhat, inv_std](Graph<S>& g, int self) {
        const Mat<S>& go = g.node(self).grad;
        Index n2 = go.rows(), d2 = go.cols();
        detail::accumulate<S>(g, gi, (go.cwiseProduct(xhat)).colwise().sum());
        detail::accumulate<S>(g, bi, go.colwise().sum());
        if (!g.node(xi).requires_grad) return;
        const Mat<S>& gval = g.node(gi).value;
        Mat<S> dx(n2, d2);
        for (Index i = 0; i < n2; ++i) {
          Eigen::Matrix<S, 1, Eigen::Dynamic> dxhat =
              (go.row(i).array() * gval.row(0).array()).matrix();
          S m1 = dxhat.mean();
          S m2 = (dxhat.cwiseProduct(xhat.row(i))).mean();
          dx.row(i) =
              ((dxhat.array() - m1 - xhat.row(i).array() * m2) * inv_std(i)).matrix();
        }
        detail::accumulate(g, xi, dx);
      });
}

// Negative log-likelihood of per-row targets: L = -sum_t logp(t, ids[t]).
template <typename S>
Var<S> pick_nll(Var<S> logp, std::vector<int> ids) {
  if (static_cast<Index>(ids.size()) != logp.rows()) {
    throw Error("pick_nll: one target per row required");
  }
  S total = S(0);
  for (size_t t = 0; t < ids.size(); ++t) {
    if (ids[t] < 0 || ids[t] >= logp.cols()) throw Error("pick_nll: target out of range");
    total -= logp.value()(static_cast<Index>(t), ids[t]);
  }
  Mat<S> v(1, 1);
  v(0, 0) = total;
  return logp.g->emplace(std::move(v), detail::wants_grad<S>({logp}),
                         [li = logp.id, ids = std::move(ids)](Graph<S>& g, int self) {
                           if (!g.node(li).requires_grad) return;
                           g.ensure_grad(li);
                           S go = g.node(self).grad(0, 0);
                           for (size_t t = 0; t < ids.size(); ++t) {
                             g.node(li).grad(static_cast<Index>(t), ids[t]) -= go;
                           }
                         });
}

// Binary cross-entropy of recall scores against 0/1 labels. Inputs at exactly
// 0 or 1 are clamped to [eps, 1-eps] and counted in g.bce_clamp_events.
template <typename S>
Var<S> bce_loss(Var<S> alpha, const std::vector<int>& labels, S eps = S(1e-7)) {
  if (alpha.cols() != 1 || static_cast<size_t>(alpha.rows()) != labels.size()) {
    throw Error("bce_loss: alpha must be |labels| x 1");
  }
  Graph<S>& g0 = *alpha.g;
  ColVec<S> clamped(alpha.rows());
  S total = S(0);
  for (Index i = 0; i < alpha.rows(); ++i) {
    S a = alpha.value()(i, 0);
    S c = std::min(std::max(a, eps), S(1) - eps);
    if (c != a) ++g0.bce_clamp_events;
    clamped(i) = c;
    S r = static_cast<S>(labels[static_cast<size_t>(i)]);
    total += -r * std::log(c) - (S(1) - r) * std::log(S(1) - c);
  }
  Mat<S> v(1, 1);
  v(0, 0) = total;
  return g0.emplace(std::move(v), detail::wants_grad<S>({alpha}),
                    [ai = alpha.id, labels, clamped](Graph<S>& g, int self) {
                      if (!g.node(ai).requires_grad) return;
                      g.ensure_grad(ai);
                      S go = g.node(self).grad(0, 0);
                      for (Index i = 0; i < clamped.size(); ++i) {
                        S r = static_cast<S>(labels[static_cast<size_t>(i)]);
                        S c = clamped(i);
                        g.node(ai).grad(i, 0) += go * (-r / c + (S(1) - r) / (S(1) - c));
                      }
                    });
}

}  // namespace ag
}  // namespace medpir

#endif  // MEDPIR_AUTOGRAD_HPP_
