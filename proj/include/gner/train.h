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

// Two-phase training, prediction and multi-seed summaries.
//
// Epochs 1..pretrain_epochs train the encoder, upper Bi-LSTM and CRF only.
// At epoch pretrain_epochs + 1 the attention levels of the mode are
// attached and everything is trained jointly. Each document is one batch;
// its loss is the mean sentence NLL.
//
// Supporting representations are eval-mode encodings held as constants:
// document-level ones are recomputed before each batch, corpus-level ones
// once per epoch. With `evidence_grad`, document-level evidence instead uses
// the batch's own train-mode encodings so gradients reach the encoder.

#ifndef GNER_TRAIN_H_
#define GNER_TRAIN_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gner/checkpoint.h"
#include "gner/corpus.h"
#include "gner/eval.h"
#include "gner/lda.h"
#include "gner/retrieval.h"
#include "gner/sgd.h"
#include "gner/tagger.h"

namespace gner {

struct TrainConfig {
  ModelConfig model;
  Mode mode = Mode::kBoth;
  int pretrain_epochs = 50;
  int finetune_epochs = 50;
  SgdOptimizer sgd;
  std::uint64_t seed = 1;
  RetrievalConfig retrieval;
  bool evidence_grad = false;

  int total_epochs() const { return pretrain_epochs + finetune_epochs; }
  void Validate() const;
};

// A corpus indexed with the model vocabularies plus its retrieval results.
struct PreparedSplit {
  Corpus corpus;
  bool doc_level = false;
  bool corpus_level = false;
  EvidenceTable evidence;
  std::optional<TopicModel> topics;
};

// Fits LDA on `corpus` alone when `corpus_level`.
PreparedSplit PrepareSplit(Corpus corpus, const Vocabulary& words, const Vocabulary& chars,
                           bool doc_level, bool corpus_level,
                           const RetrievalConfig& retrieval);

// Eval-mode encoder output per sentence, [document][sentence].
using EncodingCache = std::vector<std::vector<Matrix>>;
EncodingCache EncodeSplit(Encoder& encoder, const Corpus& corpus);

// Evidence of sentence (doc, sent) as constants read from `cache`, for the
// levels attached to `tagger`.
SentenceEvidence GatherEvidence(Tape& tape, const Tagger& tagger, const PreparedSplit& split,
                                const EncodingCache& cache, std::size_t doc, std::size_t sent);

struct AttentionRecord {
  TokenRef query;
  std::string surface;
  EvidenceLevel level = EvidenceLevel::kDocument;
  std::vector<TokenRef> refs;
  std::vector<double> alphas;
};
using AttentionSink = std::function<void(const AttentionRecord&)>;

// Viterbi tags for every sentence. `sink`, when set, receives the attention
// weights of every token with non-empty evidence.
TagTable Predict(Tagger& tagger, const PreparedSplit& split,
                 const AttentionSink& sink = nullptr);

// Indexes `corpus` with the bundle's vocabularies, retrieves the evidence
// its tagger needs from `corpus` alone and predicts.
TagTable TagCorpus(ModelBundle& bundle, const Corpus& corpus,
                   const AttentionSink& sink = nullptr);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;  // mean sentence NLL
  double dev_f1 = 0.0;
};

struct TrainOptions {
  // Extra corpora whose surfaces enter the word vocabulary when found in
  // the embedding file.
  std::vector<const Corpus*> vocabulary_corpora;
  const EmbeddingFile* embeddings = nullptr;
  // Restricts the per-epoch dev score.
  SentenceFilter dev_filter;
  std::function<void(const EpochRecord&)> on_epoch;
};

struct TrainResult {
  std::vector<EpochRecord> curve;
  int best_epoch = 0;
  double best_dev_f1 = 0.0;
  std::string best_checkpoint;
  // Best epoch within the pretraining phase; unset when it has no epochs.
  int phase1_best_epoch = 0;
  double phase1_best_dev_f1 = 0.0;
  std::string phase1_checkpoint;
  std::string final_checkpoint;
  double embedding_coverage = 0.0;
};

// Model selection is by best dev F1 (first epoch on ties). An empty dev
// corpus selects the final epoch. Throws ArgumentError on an empty
// training corpus.
TrainResult Train(const Corpus& train, const Corpus& dev, const TrainConfig& config,
                  const TrainOptions& options = {});

struct RunStats {
  std::vector<double> f1;
  double mean = 0.0;
  double max = 0.0;
};

RunStats Summarize(const std::vector<double>& f1);

// Curve as "epoch,train_loss,dev_f1" CSV with a header row.
std::string CurveCsv(const std::vector<EpochRecord>& curve);

}  // namespace gner

#endif  // GNER_TRAIN_H_
