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

#ifndef MEDPIR_CORPUS_HPP_
#define MEDPIR_CORPUS_HPP_

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "medpir/medkg.hpp"
#include "medpir/text.hpp"

namespace medpir {

enum class Speaker { kPatient, kDoctor };

std::string to_string(Speaker s);
Speaker speaker_from_string(const std::string& s);

inline constexpr std::array<const char*, 5> kEntityCategories = {
    "Disease", "Symptom", "Attribute", "Test", "Medicine"};

struct EntityAnnotation {
  std::string surface;
  std::string category;  // one of kEntityCategories
};

struct Utterance {
  Speaker speaker = Speaker::kPatient;
  std::string text;
  std::optional<std::vector<EntityAnnotation>> entities;

  Tokens tokens() const { return tokenize(text); }
};

struct Dialogue {
  std::string id;
  std::vector<Utterance> utterances;
};

// One next-doctor-turn prediction instance: history X_1..X_M, target Y.
struct Sample {
  std::string id;  // "<dialogue id>#<target utterance index>"
  std::vector<Utterance> history;
  Utterance target;
};

// Dialogue JSONL, one object per line:
// {"id": str, "utterances": [{"speaker": "patient"|"doctor", "text": str,
//  "entities"?: [{"surface": str, "category": str}]}]}
std::vector<Dialogue> load_dialogues(const std::filesystem::path& path);
void save_dialogues(const std::vector<Dialogue>& dialogues,
                    const std::filesystem::path& path);

// One Sample per doctor utterance that has at least one preceding utterance;
// the history is the full preceding prefix.
std::vector<Sample> expand_samples(const std::vector<Dialogue>& dialogues);

struct SplitRatios {
  double train = 0.8;
  double dev = 0.1;
  double test = 0.1;
};

struct DatasetSplits {
  std::vector<Dialogue> train, dev, test;
};

// Deterministic shuffle-and-cut split.
DatasetSplits split_dataset(std::vector<Dialogue> dialogues, SplitRatios ratios,
                            uint64_t seed);

// Deterministic toy corpus. Utterances embed entity surfaces drawn from kg so
// graph construction and retrieval have signal; 4-24 utterances per dialogue,
// alternating speakers starting with the patient.
std::vector<Dialogue> generate_synthetic(uint64_t seed, int n, const KnowledgeGraph& kg);

}  // namespace medpir

#endif  // MEDPIR_CORPUS_HPP_
