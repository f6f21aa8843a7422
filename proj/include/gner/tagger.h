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

// The full tagger: lower encoder, optional document- and corpus-level gated
// attention, upper Bi-LSTM over [h | D | C] and an affine CRF.
//
// The upper Bi-LSTM input is always 3 * dim wide. A level that is not
// attached contributes zeros, so attaching attention later keeps every
// existing parameter and its shape.

#ifndef GNER_TAGGER_H_
#define GNER_TAGGER_H_

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gner/attention.h"
#include "gner/corpus.h"
#include "gner/crf.h"
#include "gner/encoder.h"
#include "gner/lstm.h"
#include "gner/tensor.h"

namespace gner {

enum class Mode { kBaseline, kDocument, kCorpus, kBoth };

// "baseline", "doc", "corpus", "both".
std::string ModeName(Mode mode);
// Also accepts "+doc", "+corpus" and "+both". Throws ArgumentError.
Mode ParseMode(const std::string& name);
bool UsesDocumentLevel(Mode mode);
bool UsesCorpusLevel(Mode mode);

struct ModelConfig {
  EncoderConfig encoder;
  int attention_dim = 100;
  int upper_hidden = 100;
  // Forbid illegal BIO bigrams when decoding.
  bool bio_mask = false;

  void Validate() const;
};

// Per-token evidence for one sentence. Each entry is k x dim, or a default
// Var when the token has no evidence at that level.
struct SentenceEvidence {
  std::vector<Var> doc;
  std::vector<Var> corpus;
};

struct SentenceOutput {
  Var emissions;  // n x num_tags
  // Attention weights per token; empty where a level is absent.
  std::vector<std::vector<double>> doc_alphas;
  std::vector<std::vector<double>> corpus_alphas;
};

class Tagger {
 public:
  Tagger(const ModelConfig& config, const TagScheme& scheme, int word_vocab_size,
         int char_vocab_size);

  void Init(Rng& rng, const Matrix* pretrained = nullptr);

  // Creates and initializes the attention levels that `mode` uses and are
  // not yet present.
  void AttachAttention(Mode mode, Rng& rng);
  bool has_document_level() const { return doc_level_ != nullptr; }
  bool has_corpus_level() const { return corpus_level_ != nullptr; }

  // `local` is the n x dim encoder output for the sentence. Evidence lists,
  // when non-empty, must have one entry per token; they are ignored for
  // levels that are not attached.
  SentenceOutput Forward(Var local, const SentenceEvidence& evidence);

  Var Loss(const SentenceOutput& out, std::span<const int> gold);
  std::vector<int> Decode(const SentenceOutput& out) const;

  const ModelConfig& config() const { return config_; }
  const TagScheme& scheme() const { return scheme_; }
  int dim() const { return config_.encoder.output_dim(); }
  Encoder& encoder() { return encoder_; }
  BiLstm& upper() { return upper_; }
  CrfModel& crf() { return crf_; }
  GatedAttention* doc_level() { return doc_level_.get(); }
  GatedAttention* corpus_level() { return corpus_level_.get(); }

  // Every parameter, in a fixed order.
  std::vector<Parameter*> params();

 private:
  Var Level(GatedAttention* level, Var local, const std::vector<Var>& evidence,
            std::vector<std::vector<double>>& alphas);

  ModelConfig config_;
  TagScheme scheme_;
  Encoder encoder_;
  BiLstm upper_;
  CrfModel crf_;
  std::unique_ptr<GatedAttention> doc_level_;
  std::unique_ptr<GatedAttention> corpus_level_;
};

}  // namespace gner

#endif  // GNER_TAGGER_H_
