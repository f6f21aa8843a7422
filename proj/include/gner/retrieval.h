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

// Supporting-sentence retrieval by exact, case-sensitive surface match:
// within the query's document, or within the other documents of its topic
// cluster.

#ifndef GNER_RETRIEVAL_H_
#define GNER_RETRIEVAL_H_

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gner/corpus.h"
#include "gner/lda.h"

namespace gner {

struct TokenRef {
  std::size_t doc = 0;
  std::size_t sent = 0;
  std::size_t pos = 0;

  friend bool operator==(const TokenRef&, const TokenRef&) = default;
  friend auto operator<=>(const TokenRef&, const TokenRef&) = default;
};

struct Posting {
  std::size_t sent = 0;
  std::size_t pos = 0;

  friend bool operator==(const Posting&, const Posting&) = default;
};

// Per-document inverted index: surface -> occurrences in document order.
class DocIndex {
 public:
  static DocIndex Build(const Corpus& corpus);

  // Null when `surface` does not occur in document `doc`.
  const std::vector<Posting>* Find(std::size_t doc, const std::string& surface) const;
  std::size_t num_documents() const { return docs_.size(); }

 private:
  std::vector<std::map<std::string, std::vector<Posting>>> docs_;
};

enum class EvidenceLevel { kDocument, kCorpus };

// Supporting occurrences for one query token, at most one per supporting
// sentence (its first occurrence of the surface).
struct EvidenceSet {
  TokenRef query;
  EvidenceLevel level = EvidenceLevel::kDocument;
  std::vector<TokenRef> refs;
};

inline constexpr std::size_t kDocumentEvidenceCap = 4;
inline constexpr std::size_t kCorpusEvidenceCap = 5;

// Other sentences of the query's document containing its surface, in
// document order, truncated to `cap`.
EvidenceSet RetrieveDocumentEvidence(const Corpus& corpus, const DocIndex& index,
                                     TokenRef query,
                                     std::size_t cap = kDocumentEvidenceCap);

double CosineSimilarity(const Matrix& rows, Eigen::Index a, Eigen::Index b);

// Documents in the query document's cluster, excluding it, ranked by cosine
// similarity of topic distributions (descending, ties by ordinal).
std::vector<std::size_t> RankClusterDocuments(const TopicModel& topics,
                                              std::size_t doc);

// Matching sentences from the ranked cluster documents, each document's in
// document order, until `cap`.
EvidenceSet RetrieveCorpusEvidence(const Corpus& corpus, const TopicModel& topics,
                                   const DocIndex& index, TokenRef query,
                                   std::size_t cap = kCorpusEvidenceCap);

// Same as above with a precomputed ranking for the query's document.
EvidenceSet RetrieveCorpusEvidence(const Corpus& corpus,
                                   const std::vector<std::size_t>& ranked_docs,
                                   const DocIndex& index, TokenRef query,
                                   std::size_t cap = kCorpusEvidenceCap);

struct RetrievalConfig {
  std::size_t doc_cap = kDocumentEvidenceCap;
  std::size_t corpus_cap = kCorpusEvidenceCap;
  LdaOptions lda;
};

struct TokenEvidence {
  std::vector<TokenRef> doc;
  std::vector<TokenRef> corpus;
};

// Evidence for every token, laid out [document][sentence][token].
struct EvidenceTable {
  std::vector<std::vector<std::vector<TokenEvidence>>> tokens;

  const TokenEvidence& at(std::size_t doc, std::size_t sent, std::size_t pos) const {
    return tokens[doc][sent][pos];
  }
};

// Evidence for one split from that split alone. `topics` is required when
// `corpus_level`.
EvidenceTable BuildEvidenceTable(const Corpus& corpus, const RetrievalConfig& config,
                                 bool document_level, bool corpus_level,
                                 const TopicModel* topics);

struct CorpusStats {
  // Mean over documents with at least one mention of the percentage of
  // mentions whose surface is mentioned at least twice in the document.
  double repeat_rate = 0.0;
  // Mean over documents with a repeated surface of the percentage of
  // same-surface mention pairs that share a type. Unset if no such document.
  std::optional<double> type_consistency;
  std::size_t documents_with_mentions = 0;
  std::size_t documents_with_repeats = 0;
  std::size_t mentions = 0;
};

CorpusStats ComputeCorpusStats(const Corpus& corpus);

}  // namespace gner

#endif  // GNER_RETRIEVAL_H_
