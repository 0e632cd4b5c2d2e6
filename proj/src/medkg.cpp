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

#include "medpir/medkg.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "medpir/common.hpp"
#include "medpir/io.hpp"
#include "medpir/rng.hpp"

namespace medpir {

void KnowledgeGraph::add_entity(Entity e) {
  if (e.name.empty()) throw ParseError("kg: entity with empty name");
  auto [it, inserted] = entities_.emplace(e.name, e);
  if (!inserted && e.category && !it->second.category) {
    it->second.category = e.category;  // later line may add the category
  }
}

void KnowledgeGraph::add_relation(Relation r, bool strict) {
  for (const std::string* n : {&r.head, &r.tail}) {
    if (!entities_.count(*n)) {
      if (strict) throw ParseError("kg: relation references unknown entity: " + *n);
      add_entity({*n, std::nullopt});
    }
  }
  auto [it, inserted] = relations_.insert(std::move(r));
  if (inserted) {
    adjacency_[it->head].push_back(*it);
    if (it->tail != it->head) adjacency_[it->tail].push_back(*it);
  }
}

bool KnowledgeGraph::has_entity(const std::string& name) const {
  return entities_.count(name) > 0;
}

const Entity* KnowledgeGraph::entity(const std::string& name) const {
  auto it = entities_.find(name);
  return it == entities_.end() ? nullptr : &it->second;
}

std::vector<std::string> KnowledgeGraph::entity_names() const {
  std::vector<std::string> names;
  names.reserve(entities_.size());
  for (const auto& [name, e] : entities_) names.push_back(name);
  return names;
}

std::vector<Relation> KnowledgeGraph::relations_of(const std::string& name) const {
  auto it = adjacency_.find(name);
  if (it == adjacency_.end()) return {};
  std::vector<Relation> out = it->second;
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<EntityMatch> match_entities(const Tokens& text, const KnowledgeGraph& kg) {
  // Tokenized surfaces, bucketed by their first token; longest surface first.
  std::map<std::string, std::vector<std::pair<Tokens, const Entity*>>> by_first;
  for (const auto& name : kg.entity_names()) {
    Tokens surf = tokenize(name);
    if (surf.empty()) continue;
    by_first[surf.front()].emplace_back(std::move(surf), kg.entity(name));
  }
  for (auto& [first, cands] : by_first) {
    std::stable_sort(cands.begin(), cands.end(), [](const auto& a, const auto& b) {
      if (a.first.size() != b.first.size()) return a.first.size() > b.first.size();
      return a.second->name < b.second->name;  // tie-break for equal-length surfaces
    });
  }

  std::vector<EntityMatch> out;
  size_t i = 0;
  while (i < text.size()) {
    auto bucket = by_first.find(text[i]);
    const Entity* hit = nullptr;
    size_t hit_len = 0;
    if (bucket != by_first.end()) {
      for (const auto& [surf, ent] : bucket->second) {
        if (i + surf.size() > text.size()) continue;
        if (std::equal(surf.begin(), surf.end(), text.begin() + static_cast<long>(i))) {
          hit = ent;
          hit_len = surf.size();
          break;  // longest-first order makes the first hit the winner
        }
      }
    }
    if (hit) {
      out.push_back({*hit, i, hit_len});
      i += hit_len;
    } else {
      ++i;
    }
  }
  return out;
}

std::optional<std::string> relation_between(const std::string& a, const std::string& b,
                                            const KnowledgeGraph& kg) {
  std::optional<std::string> best;
  for (const Relation& r : kg.relations_of(a)) {
    bool connects = (r.head == a && r.tail == b) || (r.head == b && r.tail == a);
    if (!connects) continue;
    if (!best || r.rel_type < *best) best = r.rel_type;
  }
  return best;
}

KnowledgeGraph one_hop_subgraph(const std::vector<std::string>& centers,
                                const KnowledgeGraph& kg) {
  std::set<std::string> center_set;
  for (const auto& c : centers) {
    if (kg.has_entity(c)) center_set.insert(c);
  }
  KnowledgeGraph sub;
  for (const auto& c : center_set) sub.add_entity(*kg.entity(c));
  for (const auto& c : center_set) {
    for (const Relation& r : kg.relations_of(c)) {
      for (const std::string* n : {&r.head, &r.tail}) {
        if (!sub.has_entity(*n)) sub.add_entity(*kg.entity(*n));
      }
      sub.add_relation(r);
    }
  }
  return sub;
}

KnowledgeGraph load_kg(const std::filesystem::path& path, bool strict) {
  KnowledgeGraph kg;
  std::vector<std::pair<size_t, Relation>> pending;
  read_jsonl(path, [&](size_t lineno, const json& j) {
    if (j.contains("entity")) {
      Entity e;
      e.name = j.at("entity").get<std::string>();
      if (e.name.empty()) {
        throw ParseError(path.string() + ":" + std::to_string(lineno) + ": empty entity name");
      }
      if (j.contains("category") && !j.at("category").is_null()) {
        e.category = j.at("category").get<std::string>();
      }
      kg.add_entity(std::move(e));
    } else if (j.contains("head")) {
      Relation r{j.at("head").get<std::string>(), j.at("rel").get<std::string>(),
                 j.at("tail").get<std::string>()};
      pending.emplace_back(lineno, std::move(r));  // entity lines may follow triples
    } else {
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": expected an entity or triple object");
    }
  });
  for (auto& [lineno, r] : pending) {
    try {
      kg.add_relation(std::move(r), strict);
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return kg;
}

void save_kg(const KnowledgeGraph& kg, const std::filesystem::path& path) {
  std::ostringstream out;
  for (const auto& name : kg.entity_names()) {
    json j{{"entity", name}};
    const Entity* e = kg.entity(name);
    if (e->category) j["category"] = *e->category;
    out << j.dump() << "\n";
  }
  for (const Relation& r : kg.relations()) {
    out << json{{"head", r.head}, {"rel", r.rel_type}, {"tail", r.tail}}.dump() << "\n";
  }
  atomic_write(path, out.str());
}

KnowledgeGraph synthetic_kg(uint64_t seed, int n_entities, int n_relations) {
  static const char* kCategories[] = {"Disease", "Symptom", "Attribute", "Test", "Medicine"};
  static const char* kPrefixes[] = {"dis", "sym", "attr", "test", "med"};
  static const char* kRelTypes[] = {"symptom", "treats", "test_for", "attribute_of", "related"};

  Rng rng = make_rng(seed, "medkg.synthetic");
  KnowledgeGraph kg;
  std::vector<std::string> names;
  for (int i = 0; i < n_entities; ++i) {
    int cat = static_cast<int>(rng.uniform_int(0, 4));
    std::string name = std::string(kPrefixes[cat]) + std::to_string(i);
    // A handful of two-token surfaces so longest-match has work to do.
    if (rng.uniform() < 0.2) name = "acute " + name;
    kg.add_entity({name, kCategories[cat]});
    names.push_back(std::move(name));
  }
  int added = 0;
  int attempts = 0;
  while (added < n_relations && attempts < n_relations * 20) {
    ++attempts;
    if (names.size() < 2) break;
    const auto& h = names[static_cast<size_t>(rng.uniform_int(0, n_entities - 1))];
    const auto& t = names[static_cast<size_t>(rng.uniform_int(0, n_entities - 1))];
    if (h == t) continue;
    Relation r{h, kRelTypes[rng.uniform_int(0, 4)], t};
    size_t before = kg.num_relations();
    kg.add_relation(std::move(r));
    if (kg.num_relations() > before) ++added;
  }
  return kg;
}

}  // namespace medpir
