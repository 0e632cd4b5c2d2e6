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

#ifndef MEDPIR_MEDKG_HPP_
#define MEDPIR_MEDKG_HPP_

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "medpir/text.hpp"

namespace medpir {

struct Entity {
  std::string name;
  std::optional<std::string> category;
};

struct Relation {
  std::string head;
  std::string rel_type;
  std::string tail;

  friend auto operator<=>(const Relation&, const Relation&) = default;
};

// Immutable after load; all queries are read-only.
class KnowledgeGraph {
 public:
  void add_entity(Entity e);
  // strict: head/tail must already exist. lenient: auto-create them.
  void add_relation(Relation r, bool strict = true);

  bool has_entity(const std::string& name) const;
  const Entity* entity(const std::string& name) const;
  size_t num_entities() const { return entities_.size(); }
  size_t num_relations() const { return relations_.size(); }
  bool empty() const { return entities_.empty(); }

  // Deterministic orders: entities and relations sorted by name / tuple.
  std::vector<std::string> entity_names() const;
  const std::set<Relation>& relations() const { return relations_; }
  // Relations incident to `name`, in set order.
  std::vector<Relation> relations_of(const std::string& name) const;

 private:
  std::map<std::string, Entity> entities_;
  std::set<Relation> relations_;
  std::map<std::string, std::vector<Relation>> adjacency_;
};

struct EntityMatch {
  Entity entity;
  size_t start;  // token index
  size_t len;    // in tokens
};

// Greedy left-to-right longest-match-first over the token sequence.
// Matches never overlap and come back sorted by start position.
std::vector<EntityMatch> match_entities(const Tokens& text, const KnowledgeGraph& kg);

// Smallest relation label between a and b in either direction, if any.
std::optional<std::string> relation_between(const std::string& a, const std::string& b,
                                            const KnowledgeGraph& kg);

// Sub-graph of the centers present in kg, every entity adjacent to a center,
// and every relation incident to a center.
KnowledgeGraph one_hop_subgraph(const std::vector<std::string>& centers,
                                const KnowledgeGraph& kg);

// KG JSONL: entity lines {"entity": str, "category"?: str},
// triple lines {"head": str, "rel": str, "tail": str}.
KnowledgeGraph load_kg(const std::filesystem::path& path, bool strict = true);
void save_kg(const KnowledgeGraph& kg, const std::filesystem::path& path);

// Deterministic toy KG with entities drawn from the five MedDG categories and
// a few multi-token surfaces to exercise longest-match.
KnowledgeGraph synthetic_kg(uint64_t seed, int n_entities, int n_relations);

}  // namespace medpir

#endif  // MEDPIR_MEDKG_HPP_
