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

#ifndef MEDPIR_DIALOGRAPH_HPP_
#define MEDPIR_DIALOGRAPH_HPP_

#include <optional>
#include <string>
#include <vector>

#include "medpir/corpus.hpp"
#include "medpir/medkg.hpp"

namespace medpir {

enum class EdgeKind { kTemporal, kKnowledge };

struct Edge {
  int src = 0;  // src < dst; the encoder expands edges symmetrically
  int dst = 0;
  EdgeKind kind = EdgeKind::kTemporal;
  std::optional<std::string> label;  // knowledge edges only
};

// How utterance entity mentions are found when building graphs and
// retrieval candidates: gold annotations when present, string matching
// otherwise ("auto"), or one of the two forced.
enum class EntitySource { kAuto, kGold, kMatch };

EntitySource entity_source_from_string(const std::string& s);
std::string to_string(EntitySource s);

// Utterance-vertex graph: temporal edges between neighbours, one knowledge
// edge per utterance pair whose mentioned entities are related in the KG.
struct DialogueGraph {
  int num_vertices = 0;
  std::vector<Edge> edges;
  std::vector<Speaker> speakers;                        // per vertex
  std::vector<std::vector<std::string>> mentions;       // per vertex, entity names in kg

  std::vector<Edge> temporal_edges() const;
  std::vector<Edge> knowledge_edges() const;
};

// Entity names (present in kg) mentioned by one utterance, deduplicated,
// sorted; source selects gold annotations vs string matching.
std::vector<std::string> mentioned_entities(const Utterance& u, const KnowledgeGraph& kg,
                                            EntitySource source);

DialogueGraph build_graph(const std::vector<Utterance>& history, const KnowledgeGraph& kg,
                          EntitySource source = EntitySource::kAuto);

// JSONL dump line: {"id", "M", "edges": [[src,dst,kind,label]]}.
std::string graph_dump_line(const std::string& id, const DialogueGraph& g);

}  // namespace medpir

#endif  // MEDPIR_DIALOGRAPH_HPP_
