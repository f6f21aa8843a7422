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

#include "gner/lda.h"

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "gner/errors.h"

namespace gner {

std::vector<std::string> TopicModel::TopWords(int topic, std::size_t n) const {
  std::vector<int> order(words.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return topic_word(topic, a) > topic_word(topic, b);
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(n, order.size()); ++i) {
    out.push_back(words[static_cast<std::size_t>(order[i])]);
  }
  return out;
}

std::vector<std::vector<std::string>> TopicModelDocuments(const Corpus& corpus,
                                                          int stopword_top_k) {
  // Document frequency, with first appearance as the tie-break order.
  std::unordered_map<std::string, std::size_t> df;
  std::vector<std::string> first_seen;
  for (const Document& d : corpus.documents) {
    std::unordered_set<std::string> seen;
    for (const Sentence& s : d.sentences) {
      for (const Token& t : s.tokens) {
        if (!seen.insert(t.surface).second) continue;
        auto [it, inserted] = df.emplace(t.surface, 0);
        if (inserted) first_seen.push_back(t.surface);
        ++it->second;
      }
    }
  }
  std::vector<std::string> by_df = first_seen;
  std::stable_sort(by_df.begin(), by_df.end(), [&](const std::string& a, const std::string& b) {
    return df[a] > df[b];
  });
  std::unordered_set<std::string> stop;
  for (std::size_t i = 0; i < by_df.size() && i < static_cast<std::size_t>(std::max(0, stopword_top_k)); ++i) {
    stop.insert(by_df[i]);
  }

  std::vector<std::vector<std::string>> docs;
  for (const Document& d : corpus.documents) {
    std::vector<std::string>& bag = docs.emplace_back();
    for (const Sentence& s : d.sentences) {
      for (const Token& t : s.tokens) {
        if (stop.count(t.surface) > 0 || SplitChars(t.surface).size() <= 1) continue;
        bag.push_back(t.surface);
      }
    }
  }
  return docs;
}

TopicModel FitLda(const Corpus& corpus, const LdaOptions& options) {
  if (corpus.documents.empty()) throw ArgumentError("lda: corpus has no documents");
  if (options.n_topics <= 0) throw ArgumentError("lda: n_topics must be positive");
  if (options.beta <= 0.0) throw ArgumentError("lda: beta must be positive");
  if (options.iterations < 0) throw ArgumentError("lda: iterations must be >= 0");

  const int k_topics = options.n_topics;
  const double alpha = options.effective_alpha();
  const double beta = options.beta;

  TopicModel model;
  model.n_topics = k_topics;
  model.alpha = alpha;
  model.beta = beta;
  if (static_cast<std::size_t>(k_topics) > corpus.documents.size()) {
    model.warnings.push_back("n_topics (" + std::to_string(k_topics) +
                             ") exceeds number of documents (" +
                             std::to_string(corpus.documents.size()) + ")");
  }

  const auto bags = TopicModelDocuments(corpus, options.stopword_top_k);
  std::unordered_map<std::string, int> word_ids;
  std::vector<std::vector<int>> docs;
  for (const auto& bag : bags) {
    std::vector<int>& ids = docs.emplace_back();
    for (const std::string& w : bag) {
      auto [it, inserted] = word_ids.emplace(w, static_cast<int>(model.words.size()));
      if (inserted) model.words.push_back(w);
      ids.push_back(it->second);
    }
  }
  const std::size_t n_docs = docs.size();
  const std::size_t vocab = model.words.size();
  const std::size_t kt = static_cast<std::size_t>(k_topics);

  std::vector<int> topic_word(kt * vocab, 0);
  std::vector<int> topic_total(kt, 0);
  std::vector<int> doc_topic(n_docs * kt, 0);
  std::vector<std::vector<int>> assign(n_docs);
  std::size_t num_tokens = 0;

  Rng rng(options.seed);
  for (std::size_t d = 0; d < n_docs; ++d) {
    for (int w : docs[d]) {
      const std::size_t z = rng.Index(kt);
      assign[d].push_back(static_cast<int>(z));
      ++topic_word[z * vocab + static_cast<std::size_t>(w)];
      ++topic_total[z];
      ++doc_topic[d * kt + z];
      ++num_tokens;
    }
  }

  const double v_beta = static_cast<double>(vocab) * beta;
  std::vector<double> cumulative(kt);
  for (int iter = 1; iter <= options.iterations; ++iter) {
    for (std::size_t d = 0; d < n_docs; ++d) {
      for (std::size_t i = 0; i < docs[d].size(); ++i) {
        const auto w = static_cast<std::size_t>(docs[d][i]);
        auto z = static_cast<std::size_t>(assign[d][i]);
        --topic_word[z * vocab + w];
        --topic_total[z];
        --doc_topic[d * kt + z];

        double total = 0.0;
        for (std::size_t k = 0; k < kt; ++k) {
          total += (doc_topic[d * kt + k] + alpha) * (topic_word[k * vocab + w] + beta) /
                   (topic_total[k] + v_beta);
          cumulative[k] = total;
        }
        const double u = rng.Uniform() * total;
        z = 0;
        while (z + 1 < kt && cumulative[z] <= u) ++z;

        assign[d][i] = static_cast<int>(z);
        ++topic_word[z * vocab + w];
        ++topic_total[z];
        ++doc_topic[d * kt + z];
      }
    }
    if (options.observer) {
      options.observer(GibbsCounts{iter, num_tokens, &topic_word, &topic_total, &doc_topic});
    }
  }

  model.doc_topic.resize(static_cast<Eigen::Index>(n_docs), k_topics);
  model.cluster_of_doc.resize(n_docs);
  for (std::size_t d = 0; d < n_docs; ++d) {
    const double denom = static_cast<double>(docs[d].size()) + k_topics * alpha;
    int best = 0;
    for (std::size_t k = 0; k < kt; ++k) {
      const double p = (doc_topic[d * kt + k] + alpha) / denom;
      model.doc_topic(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k)) = p;
      if (p > model.doc_topic(static_cast<Eigen::Index>(d), best)) best = static_cast<int>(k);
    }
    model.cluster_of_doc[d] = best;
  }
  model.topic_word.resize(k_topics, static_cast<Eigen::Index>(vocab));
  for (std::size_t k = 0; k < kt; ++k) {
    for (std::size_t w = 0; w < vocab; ++w) {
      model.topic_word(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(w)) =
          topic_word[k * vocab + w];
    }
  }
  return model;
}

}  // namespace gner
