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

#ifndef MEDPIR_RECALL_HPP_
#define MEDPIR_RECALL_HPP_

#include <vector>

#include "medpir/corpus.hpp"
#include "medpir/embedder.hpp"

namespace medpir {

// Distant supervision for recall generation: which history utterances a
// frozen scorer deems closest to the target response.
struct RecallTarget {
  std::vector<int> selected_indices;  // selection order = descending score
  std::vector<int> labels;            // r_i per history utterance
  Tokens sequence;                    // concatenated selected utterances
  std::vector<double> scores;         // cosine per utterance, for audit dumps
};

// Cosine of each history utterance against the target, position-aligned.
std::vector<double> score_utterances(const std::vector<Utterance>& history,
                                     const Utterance& target,
                                     const SentenceEmbedder& embedder);

// Top-k by score within the last `window_rounds` rounds. A round is a
// contiguous same-speaker run pair counted from the end of the history (an
// unpaired leftover run still counts as one round). Ties go to the more
// recent utterance; the sequence is concatenated in descending-score order.
RecallTarget build_recall_target(const std::vector<Utterance>& history,
                                 const Utterance& target, const SentenceEmbedder& embedder,
                                 int k, int window_rounds, bool speaker_prefix = true);

// First eligible utterance index for the recency window (exposed for tests).
size_t recall_window_start(const std::vector<Utterance>& history, int window_rounds);

}  // namespace medpir

#endif  // MEDPIR_RECALL_HPP_
