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

#include "medpir/dialograph.hpp"

#include <set>

#include <nlohmann/json.hpp>

#include "medpir/common.hpp"

namespace medpir {

EntitySource entity_source_from_string(const std::string& s) {
  if (s == "auto") return EntitySource::kAuto;
  if (s == "gold") return EntitySource::kGold;
  if (s == "match") return EntitySource::kMatch;
  throw ConfigError("unknown entity source: " + s);
}

std::string to_string(EntitySource s) {
  switch (s) {
    case EntitySource::kAuto: return "auto";
    case EntitySource::kGold: return "gold";
    case EntitySource::kMatch: return "match";
  }
  return "auto";
}

std::vector<Edge> DialogueGraph::temporal_edges() const {
  std::vector<Edge> out;
  for (const Edge& e : edges) {
    if (e.kind == EdgeKind::kTemporal) out.push_back(e);
  }
  return out;
}

std::vector<Edge> DialogueGraph::knowledge_edges() const {
  std::vector<Edge> out;
  for (const Edge& e : edges) {
    if (e.kind == EdgeKind::kKnowledge) out.push_back(e);
  }
  return out;
}

std::vector<std::string> mentioned_entities(const Utterance& u, const KnowledgeGraph& kg,
                                            EntitySource source) {
  bool use_gold = (source == EntitySource::kGold) ||
                  (source == EntitySource::kAuto && u.entities.has_value());
  std::set<std::string> names;
  if (use_gold) {
    if (u.entities) {
      for (const auto& a : *u.entities) {
        if (kg.has_entity(a.surface)) names.insert(a.surface);
      }
    }
  } else {
    for (const auto& m : match_entities(u.tokens(), kg)) {
      names.insert(m.entity.name);
    }
  }
  return {names.begin(), names.end()};
}

DialogueGraph build_graph(const std::vector<Utterance>& history, const KnowledgeGraph& kg,
                          EntitySource source) {
  if (history.empty()) throw std::invalid_argument("build_graph: empty history");
  DialogueGraph g;
  g.num_vertices = static_cast<int>(history.size());
  for (const auto& u : history) {
    g.speakers.push_back(u.speaker);
    g.mentions.push_back(mentioned_entities(u, kg, source));
  }
  for (int i = 0; i + 1 < g.num_vertices; ++i) {
    g.edges.push_back({i, i + 1, EdgeKind::kTemporal, std::nullopt});
  }
  // One knowledge edge per utterance pair; the first related entity pair in
  // lexicographic order decides the label.
  for (int i = 0; i < g.num_vertices; ++i) {
    for (int j = i + 1; j < g.num_vertices; ++j) {
      std::optional<std::string> label;
      for (const auto& ei : g.mentions[static_cast<size_t>(i)]) {
        for (const auto& ej : g.mentions[static_cast<size_t>(j)]) {
          if (auto rel = relation_between(ei, ej, kg)) {
            label = *rel;
            break;
          }
        }
        if (label) break;
      }
      if (label) g.edges.push_back({i, j, EdgeKind::kKnowledge, label});
    }
  }
  return g;
}

std::string graph_dump_line(const std::string& id, const DialogueGraph& g) {
  json edges = json::array();
  for (const Edge& e : g.edges) {
    json lbl = e.label ? json(*e.label) : json(nullptr);
    edges.push_back(json::array(
        {e.src, e.dst, e.kind == EdgeKind::kTemporal ? "temporal" : "knowledge", lbl}));
  }
  return json{{"id", id}, {"M", g.num_vertices}, {"edges", edges}}.dump();
}

}  // namespace medpir
