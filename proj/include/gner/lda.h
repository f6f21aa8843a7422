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

// Latent Dirichlet allocation by collapsed Gibbs sampling, used to cluster
// documents by their most probable topic.

#ifndef GNER_LDA_H_
#define GNER_LDA_H_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gner/corpus.h"
#include "gner/tensor.h"

namespace gner {

// Sampler counts exposed to an observer after every sweep.
struct GibbsCounts {
  int iteration = 0;
  std::size_t num_tokens = 0;
  const std::vector<int>* topic_word = nullptr;   // topics x vocab, row-major
  const std::vector<int>* topic_total = nullptr;  // per topic
  const std::vector<int>* doc_topic = nullptr;    // docs x topics, row-major
};

struct LdaOptions {
  int n_topics = 20;
  // Non-positive means 50 / n_topics.
  double alpha = 0.0;
  double beta = 0.01;
  int iterations = 1000;
  std::uint64_t seed = 1;
  // Most document-frequent surfaces dropped as stopwords.
  int stopword_top_k = 30;
  std::function<void(const GibbsCounts&)> observer;

  double effective_alpha() const { return alpha > 0.0 ? alpha : 50.0 / n_topics; }
};

struct TopicModel {
  int n_topics = 0;
  double alpha = 0.0;
  double beta = 0.0;
  Matrix doc_topic;                    // docs x topics, rows sum to 1
  std::vector<int> cluster_of_doc;     // argmax of doc_topic, lowest index on ties
  std::vector<std::string> words;      // topic-model vocabulary
  Matrix topic_word;                   // topics x words, final counts
  std::vector<std::string> warnings;

  // Highest-count words of `topic`, ties broken by word id.
  std::vector<std::string> TopWords(int topic, std::size_t n) const;
};

// Bag of words per document after stopword removal: the stopword_top_k most
// document-frequent surfaces and all single-character surfaces go.
std::vector<std::vector<std::string>> TopicModelDocuments(const Corpus& corpus,
                                                          int stopword_top_k);

TopicModel FitLda(const Corpus& corpus, const LdaOptions& options);

}  // namespace gner

#endif  // GNER_LDA_H_
