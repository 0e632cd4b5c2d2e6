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

#include "medpir/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "medpir/common.hpp"
#include "medpir/io.hpp"
#include "medpir/rng.hpp"

namespace medpir {

std::string to_string(Speaker s) {
  return s == Speaker::kPatient ? "patient" : "doctor";
}

Speaker speaker_from_string(const std::string& s) {
  if (s == "patient") return Speaker::kPatient;
  if (s == "doctor") return Speaker::kDoctor;
  throw ParseError("unknown speaker: " + s);
}

namespace {

bool valid_category(const std::string& c) {
  return std::find(kEntityCategories.begin(), kEntityCategories.end(), c) !=
         kEntityCategories.end();
}

Utterance parse_utterance(const json& j, const std::string& where) {
  Utterance u;
  u.speaker = speaker_from_string(j.at("speaker").get<std::string>());
  u.text = j.at("text").get<std::string>();
  if (u.text.empty()) throw ParseError(where + ": empty utterance text");
  if (j.contains("entities")) {
    std::vector<EntityAnnotation> anns;
    for (const auto& ej : j.at("entities")) {
      EntityAnnotation a{ej.at("surface").get<std::string>(),
                         ej.at("category").get<std::string>()};
      if (!valid_category(a.category)) {
        throw ParseError(where + ": unknown entity category: " + a.category);
      }
      if (u.text.find(a.surface) == std::string::npos) {
        throw ParseError(where + ": entity surface not found in text: " + a.surface);
      }
      anns.push_back(std::move(a));
    }
    u.entities = std::move(anns);
  }
  return u;
}

json utterance_to_json(const Utterance& u) {
  json j{{"speaker", to_string(u.speaker)}, {"text", u.text}};
  if (u.entities) {
    json anns = json::array();
    for (const auto& a : *u.entities) {
      anns.push_back({{"surface", a.surface}, {"category", a.category}});
    }
    j["entities"] = std::move(anns);
  }
  return j;
}

}  // namespace

std::vector<Dialogue> load_dialogues(const std::filesystem::path& path) {
  std::vector<Dialogue> out;
  read_jsonl(path, [&](size_t lineno, const json& j) {
    std::string where = path.string() + ":" + std::to_string(lineno);
    try {
      Dialogue d;
      d.id = j.at("id").get<std::string>();
      for (const auto& uj : j.at("utterances")) {
        d.utterances.push_back(parse_utterance(uj, where));
      }
      if (d.utterances.size() < 2) {
        throw ParseError(where + ": dialogue has fewer than 2 utterances");
      }
      out.push_back(std::move(d));
    } catch (const json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
  });
  return out;
}

void save_dialogues(const std::vector<Dialogue>& dialogues,
                    const std::filesystem::path& path) {
  std::ostringstream os;
  for (const auto& d : dialogues) {
    json j{{"id", d.id}, {"utterances", json::array()}};
    for (const auto& u : d.utterances) j["utterances"].push_back(utterance_to_json(u));
    os << j.dump() << "\n";
  }
  atomic_write(path, os.str());
}

std::vector<Sample> expand_samples(const std::vector<Dialogue>& dialogues) {
  std::vector<Sample> samples;
  for (const auto& d : dialogues) {
    for (size_t i = 1; i < d.utterances.size(); ++i) {
      if (d.utterances[i].speaker != Speaker::kDoctor) continue;
      Sample s;
      s.id = d.id + "#" + std::to_string(i);
      s.history.assign(d.utterances.begin(), d.utterances.begin() + static_cast<long>(i));
      s.target = d.utterances[i];
      samples.push_back(std::move(s));
    }
  }
  return samples;
}

DatasetSplits split_dataset(std::vector<Dialogue> dialogues, SplitRatios ratios,
                            uint64_t seed) {
  if (ratios.train < 0 || ratios.dev < 0 || ratios.test < 0 ||
      ratios.train + ratios.dev + ratios.test > 1.0 + 1e-9) {
    throw ConfigError("split ratios must be non-negative and sum to at most 1");
  }
  Rng rng = make_rng(seed, "corpus.split");
  rng.shuffle(dialogues);
  size_t n = dialogues.size();
  size_t n_train = static_cast<size_t>(std::floor(ratios.train * static_cast<double>(n)));
  size_t n_dev = static_cast<size_t>(std::floor(ratios.dev * static_cast<double>(n)));
  n_train = std::min(n_train, n);
  n_dev = std::min(n_dev, n - n_train);
  DatasetSplits splits;
  splits.train.assign(dialogues.begin(), dialogues.begin() + static_cast<long>(n_train));
  splits.dev.assign(dialogues.begin() + static_cast<long>(n_train),
                    dialogues.begin() + static_cast<long>(n_train + n_dev));
  splits.test.assign(dialogues.begin() + static_cast<long>(n_train + n_dev), dialogues.end());
  return splits;
}

namespace {

struct Template {
  const char* before;
  const char* after;
};

// Patient templates lean on symptoms, doctor templates on the full inventory.
const Template kPatientTemplates[] = {
    {"i have", "since yesterday"},
    {"my", "is getting worse"},
    {"still feeling", "after meals"},
    {"the", "comes and goes"},
};
const Template kDoctorTemplates[] = {
    {"take", "twice a day"},
    {"you may have", "we should check"},
    {"please do a", "first"},
    {"this looks like", "to me"},
    {"any history of", "in your family"},
};

}  // namespace

std::vector<Dialogue> generate_synthetic(uint64_t seed, int n, const KnowledgeGraph& kg) {
  if (n < 0) throw std::invalid_argument("generate_synthetic: n must be non-negative");
  if (kg.empty()) throw std::invalid_argument("generate_synthetic: kg must be non-empty");

  const std::vector<std::string> names = kg.entity_names();
  Rng rng = make_rng(seed, "corpus.synthetic");
  std::vector<Dialogue> out;
  out.reserve(static_cast<size_t>(n));
  for (int di = 0; di < n; ++di) {
    Dialogue d;
    d.id = "syn" + std::to_string(di);
    int len = static_cast<int>(rng.uniform_int(4, 10));  // within the 4-24 contract
    for (int ui = 0; ui < len; ++ui) {
      Utterance u;
      u.speaker = (ui % 2 == 0) ? Speaker::kPatient : Speaker::kDoctor;
      bool patient = u.speaker == Speaker::kPatient;
      const Template& tpl = patient
          ? kPatientTemplates[rng.uniform_int(0, std::size(kPatientTemplates) - 1)]
          : kDoctorTemplates[rng.uniform_int(0, std::size(kDoctorTemplates) - 1)];
      const std::string& ent = names[static_cast<size_t>(
          rng.uniform_int(0, static_cast<int64_t>(names.size()) - 1))];
      u.text = std::string(tpl.before) + " " + ent + " " + tpl.after;
      std::vector<EntityAnnotation> anns;
      auto annotate = [&](const std::string& name) {
        const Entity* e = kg.entity(name);
        if (e->category) anns.push_back({name, *e->category});
      };
      annotate(ent);
      // Occasionally mention a second, related entity.
      if (rng.uniform() < 0.35) {
        std::vector<Relation> rels = kg.relations_of(ent);
        if (!rels.empty()) {
          const Relation& r = rels[static_cast<size_t>(
              rng.uniform_int(0, static_cast<int64_t>(rels.size()) - 1))];
          const std::string& other = (r.head == ent) ? r.tail : r.head;
          u.text += " and " + other;
          annotate(other);
        }
      }
      u.entities = std::move(anns);
      d.utterances.push_back(std::move(u));
    }
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace medpir
