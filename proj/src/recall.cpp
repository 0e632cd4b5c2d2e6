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

#include "medpir/recall.hpp"

#include <algorithm>

#include "medpir/common.hpp"

namespace medpir {

std::vector<double> score_utterances(const std::vector<Utterance>& history,
                                     const Utterance& target,
                                     const SentenceEmbedder& embedder) {
  if (history.empty()) throw std::invalid_argument("score_utterances: empty history");
  Embedding target_emb = embedder.embed(target.tokens());
  std::vector<double> scores;
  scores.reserve(history.size());
  for (const Utterance& u : history) {
    scores.push_back(cosine(embedder.embed(u.tokens()), target_emb));
  }
  return scores;
}

size_t recall_window_start(const std::vector<Utterance>& history, int window_rounds) {
  // Contiguous same-speaker runs, oldest first.
  std::vector<size_t> run_starts;
  for (size_t i = 0; i < history.size(); ++i) {
    if (i == 0 || history[i].speaker != history[i - 1].speaker) run_starts.push_back(i);
  }
  size_t n_runs = run_starts.size();
  size_t eligible_runs = std::min<size_t>(2 * static_cast<size_t>(window_rounds), n_runs);
  return run_starts[n_runs - eligible_runs];
}

RecallTarget build_recall_target(const std::vector<Utterance>& history,
                                 const Utterance& target, const SentenceEmbedder& embedder,
                                 int k, int window_rounds, bool speaker_prefix) {
  if (k < 1) throw std::invalid_argument("build_recall_target: k must be >= 1");
  if (window_rounds < 1) {
    throw std::invalid_argument("build_recall_target: window_rounds must be >= 1");
  }
  RecallTarget out;
  out.scores = score_utterances(history, target, embedder);

  size_t first_eligible = recall_window_start(history, window_rounds);
  std::vector<size_t> eligible;
  for (size_t i = first_eligible; i < history.size(); ++i) eligible.push_back(i);

  std::sort(eligible.begin(), eligible.end(), [&](size_t a, size_t b) {
    if (out.scores[a] != out.scores[b]) return out.scores[a] > out.scores[b];
    return a > b;  // tie toward the more recent utterance
  });
  size_t take = std::min(static_cast<size_t>(k), eligible.size());

  out.labels.assign(history.size(), 0);
  for (size_t s = 0; s < take; ++s) {
    size_t idx = eligible[s];
    out.selected_indices.push_back(static_cast<int>(idx));
    out.labels[idx] = 1;
    const Utterance& u = history[idx];
    if (speaker_prefix) {
      out.sequence.push_back(u.speaker == Speaker::kPatient ? "[PAT]" : "[DOC]");
    }
    Tokens toks = u.tokens();
    out.sequence.insert(out.sequence.end(), toks.begin(), toks.end());
  }
  return out;
}

}  // namespace medpir
