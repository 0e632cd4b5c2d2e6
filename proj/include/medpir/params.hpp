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

#ifndef MEDPIR_PARAMS_HPP_
#define MEDPIR_PARAMS_HPP_

#include <cmath>
#include <cstring>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "medpir/common.hpp"
#include "medpir/io.hpp"
#include "medpir/rng.hpp"

namespace medpir {

enum class Init { kZero, kOne, kNormal, kXavier };

// Named parameter tensors plus gradient accumulators. Initialization is a
// pure function of (root seed, tensor name), so creation order never matters.
// Single writer: the optimizer step; forward passes only read values.
template <typename S>
class ParamStore {
 public:
  explicit ParamStore(uint64_t seed = 0) : seed_(seed) {}

  Mat<S>& ensure(const std::string& name, Index rows, Index cols, Init init,
                 S normal_std = S(0.02)) {
    auto it = values_.find(name);
    if (it != values_.end()) {
      if (it->second.rows() != rows || it->second.cols() != cols) {
        throw ConfigError("parameter shape mismatch for " + name);
      }
      return it->second;
    }
    Mat<S> m(rows, cols);
    switch (init) {
      case Init::kZero:
        m.setZero();
        break;
      case Init::kOne:
        m.setOnes();
        break;
      case Init::kNormal: {
        Rng rng = make_rng(seed_, name);
        for (Index j = 0; j < cols; ++j)
          for (Index i = 0; i < rows; ++i) m(i, j) = static_cast<S>(rng.normal()) * normal_std;
        break;
      }
      case Init::kXavier: {
        Rng rng = make_rng(seed_, name);
        double bound = std::sqrt(6.0 / static_cast<double>(rows + cols));
        for (Index j = 0; j < cols; ++j)
          for (Index i = 0; i < rows; ++i)
            m(i, j) = static_cast<S>((rng.uniform() * 2.0 - 1.0) * bound);
        break;
      }
    }
    return values_.emplace(name, std::move(m)).first->second;
  }

  bool has(const std::string& name) const { return values_.count(name) > 0; }

  Mat<S>& value(const std::string& name) {
    auto it = values_.find(name);
    if (it == values_.end()) throw Error("unknown parameter: " + name);
    return it->second;
  }
  const Mat<S>& value(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end()) throw Error("unknown parameter: " + name);
    return it->second;
  }

  Mat<S>& grad(const std::string& name) {
    auto it = grads_.find(name);
    if (it == grads_.end()) {
      const Mat<S>& v = value(name);
      it = grads_.emplace(name, Mat<S>::Zero(v.rows(), v.cols())).first;
    }
    return it->second;
  }

  void zero_grads() {
    for (auto& [name, g] : grads_) g.setZero();
  }

  // Deterministic iteration order (std::map) keeps optimizer updates and
  // serialization reproducible.
  const std::map<std::string, Mat<S>>& values() const { return values_; }
  std::map<std::string, Mat<S>>& mutable_values() { return values_; }
  const std::map<std::string, Mat<S>>& grads() const { return grads_; }
  uint64_t seed() const { return seed_; }

  json to_json() const {
    json tensors = json::object();
    for (const auto& [name, m] : values_) {
      tensors[name] = {{"rows", m.rows()},
                       {"cols", m.cols()},
                       {"dtype", sizeof(S) == 4 ? "f32" : "f64"},
                       {"data", base64_encode(m.data(), sizeof(S) * static_cast<size_t>(m.size()))}};
    }
    return tensors;
  }

  void from_json(const json& tensors) {
    values_.clear();
    grads_.clear();
    for (auto it = tensors.begin(); it != tensors.end(); ++it) {
      const json& t = it.value();
      std::string dtype = t.at("dtype").get<std::string>();
      if ((dtype == "f32") != (sizeof(S) == 4)) {
        throw ParseError("checkpoint dtype mismatch for tensor " + it.key());
      }
      Index rows = t.at("rows").get<Index>();
      Index cols = t.at("cols").get<Index>();
      std::vector<uint8_t> bytes = base64_decode(t.at("data").get<std::string>());
      if (bytes.size() != sizeof(S) * static_cast<size_t>(rows * cols)) {
        throw ParseError("checkpoint tensor size mismatch for " + it.key());
      }
      Mat<S> m(rows, cols);
      std::memcpy(m.data(), bytes.data(), bytes.size());
      values_.emplace(it.key(), std::move(m));
    }
  }

 private:
  uint64_t seed_;
  std::map<std::string, Mat<S>> values_;
  std::map<std::string, Mat<S>> grads_;
};

}  // namespace medpir

#endif  // MEDPIR_PARAMS_HPP_
