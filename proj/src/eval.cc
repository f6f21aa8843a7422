// Copyright 2026 The gner Authors.
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

#include "gner/eval.h"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>

#include "gner/errors.h"

namespace gner {

void Scores::Finalize() {
  precision = predicted == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(predicted);
  recall = gold == 0 ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(gold);
  f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

namespace {

nlohmann::json ScoresJson(const Scores& s) {
  return {{"gold", s.gold},           {"predicted", s.predicted},
          {"correct", s.correct},     {"precision", s.precision},
          {"recall", s.recall},       {"f1", s.f1}};
}

}  // namespace

nlohmann::json EvalReport::ToJson() const {
  nlohmann::json j;
  j["overall"] = ScoresJson(overall);
  j["per_type"] = nlohmann::json::object();
  for (const auto& [type, s] : per_type) j["per_type"][type] = ScoresJson(s);
  j["tokens"] = tokens;
  j["token_accuracy"] = token_accuracy;
  return j;
}

std::string EvalReport::ToConllevalText() const {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "processed %zu tokens with %zu phrases; found: %zu phrases; correct: %zu.\n",
                tokens, overall.gold, overall.predicted, overall.correct);
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "accuracy: %6.2f%%; precision: %6.2f%%; recall: %6.2f%%; FB1: %6.2f\n",
                token_accuracy, overall.precision, overall.recall, overall.f1);
  out << buf;
  for (const auto& [type, s] : per_type) {
    std::snprintf(buf, sizeof(buf),
                  "%17s: precision: %6.2f%%; recall: %6.2f%%; FB1: %6.2f  %zu\n",
                  type.c_str(), s.precision, s.recall, s.f1, s.predicted);
    out << buf;
  }
  return out.str();
}

EvalReport Evaluate(const TagTable& pred, const Corpus& gold, const SentenceFilter& filter) {
  const TagScheme& scheme = gold.tag_set;
  if (pred.size() != gold.documents.size()) {
    throw ArgumentError("evaluate: " + std::to_string(pred.size()) +
                        " predicted documents vs " +
                        std::to_string(gold.documents.size()) + " gold");
  }
  EvalReport report;
  for (const std::string& type : scheme.entity_types()) report.per_type[type];
  for (std::size_t d = 0; d < pred.size(); ++d) {
    const Document& doc = gold.documents[d];
    if (pred[d].size() != doc.sentences.size()) {
      throw ArgumentError("evaluate: sentence count mismatch in document " +
                          std::to_string(d));
    }
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      const auto& tokens = doc.sentences[s].tokens;
      if (pred[d][s].size() != tokens.size()) {
        throw ArgumentError("evaluate: token count mismatch in document " +
                            std::to_string(d) + " sentence " + std::to_string(s));
      }
      if (filter && !filter(d, s)) continue;
      std::vector<int> gold_tags;
      for (const Token& t : tokens) gold_tags.push_back(t.gold_tag);
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        ++report.tokens;
        if (pred[d][s][i] == gold_tags[i]) ++report.correct_tokens;
      }
      const std::vector<Entity> g = ExtractEntities(gold_tags, scheme);
      const std::vector<Entity> p = ExtractEntities(pred[d][s], scheme);
      const std::set<Entity> gold_set(g.begin(), g.end());
      for (const Entity& e : g) {
        ++report.overall.gold;
        ++report.per_type[scheme.entity_types()[static_cast<std::size_t>(e.type)]].gold;
      }
      for (const Entity& e : p) {
        Scores& ts = report.per_type[scheme.entity_types()[static_cast<std::size_t>(e.type)]];
        ++report.overall.predicted;
        ++ts.predicted;
        if (gold_set.count(e) > 0) {
          ++report.overall.correct;
          ++ts.correct;
        }
      }
    }
  }
  report.overall.Finalize();
  for (auto& [type, s] : report.per_type) s.Finalize();
  report.token_accuracy = report.tokens == 0 ? 0.0
                                             : 100.0 * static_cast<double>(report.correct_tokens) /
                                                   static_cast<double>(report.tokens);
  return report;
}

EvalReport Evaluate(const Corpus& pred, const Corpus& gold) {
  if (pred.documents.size() != gold.documents.size()) {
    throw ArgumentError("evaluate: document count mismatch");
  }
  for (std::size_t d = 0; d < gold.documents.size(); ++d) {
    const auto& ps = pred.documents[d].sentences;
    const auto& gs = gold.documents[d].sentences;
    if (ps.size() != gs.size()) throw ArgumentError("evaluate: sentence count mismatch");
    for (std::size_t s = 0; s < gs.size(); ++s) {
      if (ps[s].tokens.size() != gs[s].tokens.size()) {
        throw ArgumentError("evaluate: token count mismatch");
      }
      for (std::size_t i = 0; i < gs[s].tokens.size(); ++i) {
        if (ps[s].tokens[i].surface != gs[s].tokens[i].surface) {
          throw ArgumentError("evaluate: surface mismatch '" + ps[s].tokens[i].surface +
                              "' vs '" + gs[s].tokens[i].surface + "'");
        }
      }
    }
  }
  return Evaluate(GoldTags(pred), gold);
}

TagTable MajorityVotePropagate(const Corpus& corpus, const TagTable& pred,
                               PropagationLevel level) {
  TagTable out = pred;
  const int num_tags = corpus.tag_set.size();
  auto vote = [&](std::size_t doc_begin, std::size_t doc_end) {
    // surface -> per-tag counts, accumulated in a deterministic order.
    std::map<std::string, std::vector<int>> counts;
    for (std::size_t d = doc_begin; d < doc_end; ++d) {
      const auto& sents = corpus.documents[d].sentences;
      for (std::size_t s = 0; s < sents.size(); ++s) {
        for (std::size_t i = 0; i < sents[s].tokens.size(); ++i) {
          auto& c = counts[sents[s].tokens[i].surface];
          if (c.empty()) c.assign(static_cast<std::size_t>(num_tags), 0);
          ++c.at(static_cast<std::size_t>(pred.at(d).at(s).at(i)));
        }
      }
    }
    std::map<std::string, int> winner;
    for (const auto& [surface, c] : counts) {
      const auto top = std::max_element(c.begin(), c.end());
      if (std::count(c.begin(), c.end(), *top) == 1) {
        winner[surface] = static_cast<int>(top - c.begin());
      }
    }
    for (std::size_t d = doc_begin; d < doc_end; ++d) {
      const auto& sents = corpus.documents[d].sentences;
      for (std::size_t s = 0; s < sents.size(); ++s) {
        for (std::size_t i = 0; i < sents[s].tokens.size(); ++i) {
          auto it = winner.find(sents[s].tokens[i].surface);
          if (it != winner.end()) out[d][s][i] = it->second;
        }
      }
    }
  };
  if (pred.size() != corpus.documents.size()) {
    throw ArgumentError("propagate: document count mismatch");
  }
  if (level == PropagationLevel::kCorpus) {
    vote(0, corpus.documents.size());
  } else {
    for (std::size_t d = 0; d < corpus.documents.size(); ++d) vote(d, d + 1);
  }
  return out;
}

}  // namespace gner
