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

#include "gner/retrieval.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gner/errors.h"

namespace gner {

DocIndex DocIndex::Build(const Corpus& corpus) {
  DocIndex index;
  index.docs_.resize(corpus.documents.size());
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    const Document& doc = corpus.documents[d];
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      const auto& tokens = doc.sentences[s].tokens;
      for (std::size_t p = 0; p < tokens.size(); ++p) {
        index.docs_[d][tokens[p].surface].push_back(Posting{s, p});
      }
    }
  }
  return index;
}

const std::vector<Posting>* DocIndex::Find(std::size_t doc,
                                           const std::string& surface) const {
  if (doc >= docs_.size()) return nullptr;
  auto it = docs_[doc].find(surface);
  return it == docs_[doc].end() ? nullptr : &it->second;
}

namespace {

const std::string& SurfaceAt(const Corpus& corpus, TokenRef ref) {
  return corpus.documents.at(ref.doc).sentences.at(ref.sent).tokens.at(ref.pos).surface;
}

// Appends the first occurrence per sentence, skipping `skip_sent` when set.
void CollectFromDocument(const std::vector<Posting>& postings, std::size_t doc,
                         std::optional<std::size_t> skip_sent, std::size_t cap,
                         std::vector<TokenRef>& out) {
  std::optional<std::size_t> last_sent;
  for (const Posting& p : postings) {
    if (out.size() >= cap) return;
    if (skip_sent && p.sent == *skip_sent) continue;
    if (last_sent && *last_sent == p.sent) continue;
    last_sent = p.sent;
    out.push_back(TokenRef{doc, p.sent, p.pos});
  }
}

}  // namespace

EvidenceSet RetrieveDocumentEvidence(const Corpus& corpus, const DocIndex& index,
                                     TokenRef query, std::size_t cap) {
  EvidenceSet out;
  out.query = query;
  out.level = EvidenceLevel::kDocument;
  const std::vector<Posting>* postings = index.Find(query.doc, SurfaceAt(corpus, query));
  if (postings != nullptr) {
    CollectFromDocument(*postings, query.doc, query.sent, cap, out.refs);
  }
  return out;
}

double CosineSimilarity(const Matrix& rows, Eigen::Index a, Eigen::Index b) {
  const double na = rows.row(a).norm();
  const double nb = rows.row(b).norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return rows.row(a).dot(rows.row(b)) / (na * nb);
}

std::vector<std::size_t> RankClusterDocuments(const TopicModel& topics, std::size_t doc) {
  if (doc >= topics.cluster_of_doc.size()) {
    throw ArgumentError("retrieval: document " + std::to_string(doc) +
                        " not covered by the topic model");
  }
  const int cluster = topics.cluster_of_doc[doc];
  std::vector<std::pair<double, std::size_t>> scored;
  for (std::size_t d = 0; d < topics.cluster_of_doc.size(); ++d) {
    if (d == doc || topics.cluster_of_doc[d] != cluster) continue;
    scored.emplace_back(CosineSimilarity(topics.doc_topic, static_cast<Eigen::Index>(doc),
                                         static_cast<Eigen::Index>(d)),
                        d);
  }
  std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second < y.second;
  });
  std::vector<std::size_t> out;
  for (const auto& [score, d] : scored) out.push_back(d);
  return out;
}

EvidenceSet RetrieveCorpusEvidence(const Corpus& corpus,
                                   const std::vector<std::size_t>& ranked_docs,
                                   const DocIndex& index, TokenRef query,
                                   std::size_t cap) {
  EvidenceSet out;
  out.query = query;
  out.level = EvidenceLevel::kCorpus;
  const std::string& surface = SurfaceAt(corpus, query);
  for (std::size_t d : ranked_docs) {
    if (out.refs.size() >= cap) break;
    if (d == query.doc) continue;
    const std::vector<Posting>* postings = index.Find(d, surface);
    if (postings != nullptr) CollectFromDocument(*postings, d, std::nullopt, cap, out.refs);
  }
  return out;
}

EvidenceSet RetrieveCorpusEvidence(const Corpus& corpus, const TopicModel& topics,
                                   const DocIndex& index, TokenRef query,
                                   std::size_t cap) {
  return RetrieveCorpusEvidence(corpus, RankClusterDocuments(topics, query.doc), index,
                                query, cap);
}

EvidenceTable BuildEvidenceTable(const Corpus& corpus, const RetrievalConfig& config,
                                 bool document_level, bool corpus_level,
                                 const TopicModel* topics) {
  if (corpus_level && topics == nullptr) {
    throw ArgumentError("retrieval: corpus-level evidence needs a topic model");
  }
  if (corpus_level && topics->cluster_of_doc.size() != corpus.documents.size()) {
    throw ArgumentError("retrieval: topic model covers " +
                        std::to_string(topics->cluster_of_doc.size()) +
                        " documents, corpus has " +
                        std::to_string(corpus.documents.size()));
  }
  const DocIndex index = DocIndex::Build(corpus);
  EvidenceTable table;
  table.tokens.resize(corpus.documents.size());
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    std::vector<std::size_t> ranked;
    if (corpus_level) ranked = RankClusterDocuments(*topics, d);
    const Document& doc = corpus.documents[d];
    table.tokens[d].resize(doc.sentences.size());
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      auto& row = table.tokens[d][s];
      row.resize(doc.sentences[s].tokens.size());
      for (std::size_t p = 0; p < row.size(); ++p) {
        const TokenRef q{d, s, p};
        if (document_level) {
          row[p].doc = RetrieveDocumentEvidence(corpus, index, q, config.doc_cap).refs;
        }
        if (corpus_level) {
          row[p].corpus =
              RetrieveCorpusEvidence(corpus, ranked, index, q, config.corpus_cap).refs;
        }
      }
    }
  }
  return table;
}

CorpusStats ComputeCorpusStats(const Corpus& corpus) {
  CorpusStats stats;
  double repeat_sum = 0.0;
  double consistency_sum = 0.0;
  for (const Document& doc : corpus.documents) {
    // surface -> types of its mentions (in order of occurrence).
    std::map<std::string, std::vector<int>> mentions;
    std::size_t total = 0;
    for (const Sentence& s : doc.sentences) {
      std::vector<int> tags;
      for (const Token& t : s.tokens) tags.push_back(t.gold_tag);
      for (const Entity& e : ExtractEntities(tags, corpus.tag_set)) {
        std::string surface;
        for (std::size_t i = e.begin; i < e.end; ++i) {
          if (i > e.begin) surface += ' ';
          surface += s.tokens[i].surface;
        }
        mentions[surface].push_back(e.type);
        ++total;
      }
    }
    if (total == 0) continue;
    stats.mentions += total;
    ++stats.documents_with_mentions;

    std::size_t repeated = 0;
    std::size_t pairs = 0;
    std::size_t same = 0;
    for (const auto& [surface, types] : mentions) {
      if (types.size() < 2) continue;
      repeated += types.size();
      for (std::size_t i = 0; i < types.size(); ++i) {
        for (std::size_t j = i + 1; j < types.size(); ++j) {
          ++pairs;
          if (types[i] == types[j]) ++same;
        }
      }
    }
    repeat_sum += 100.0 * static_cast<double>(repeated) / static_cast<double>(total);
    if (pairs > 0) {
      ++stats.documents_with_repeats;
      consistency_sum += 100.0 * static_cast<double>(same) / static_cast<double>(pairs);
    }
  }
  if (stats.documents_with_mentions > 0) {
    stats.repeat_rate = repeat_sum / static_cast<double>(stats.documents_with_mentions);
  }
  if (stats.documents_with_repeats > 0) {
    stats.type_consistency =
        consistency_sum / static_cast<double>(stats.documents_with_repeats);
  }
  return stats;
}

}  // namespace gner
