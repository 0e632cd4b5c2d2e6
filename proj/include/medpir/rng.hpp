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

#ifndef MEDPIR_RNG_HPP_
#define MEDPIR_RNG_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace medpir {

// Deterministic xoshiro256** generator. The standard <random> distributions
// are implementation-defined, so uniform/normal draws are produced here
// explicitly. All randomness in a run flows from one root seed, split per
// subsystem by fixed string labels.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0);

  uint64_t next_u64();
  // Uniform in [0, 1).
  double uniform();
  // Uniform integer in [lo, hi], inclusive.
  int64_t uniform_int(int64_t lo, int64_t hi);
  // Standard normal via Box-Muller (no cached spare, so state stays small).
  double normal();

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = static_cast<size_t>(uniform_int(0, static_cast<int64_t>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::string state_hex() const;
  static Rng from_state_hex(const std::string& hex);

 private:
  std::array<uint64_t, 4> s_{};
};

uint64_t hash_label(std::string_view label);

// Child stream derived from (root, label[, index]). Does not perturb any
// parent generator.
Rng make_rng(uint64_t root_seed, std::string_view label);
Rng make_rng(uint64_t root_seed, std::string_view label, uint64_t index);

}  // namespace medpir

#endif  // MEDPIR_RNG_HPP_
