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

#include "gner/tagger.h"

#include "gner/errors.h"

namespace gner {

std::string ModeName(Mode mode) {
  switch (mode) {
    case Mode::kBaseline:
      return "baseline";
    case Mode::kDocument:
      return "doc";
    case Mode::kCorpus:
      return "corpus";
    case Mode::kBoth:
      return "both";
  }
  return "baseline";
}

Mode ParseMode(const std::string& name) {
  std::string n = name;
  if (!n.empty() && n[0] == '+') n.erase(0, 1);
  if (n == "baseline") return Mode::kBaseline;
  if (n == "doc" || n == "document") return Mode::kDocument;
  if (n == "corpus") return Mode::kCorpus;
  if (n == "both") return Mode::kBoth;
  throw ArgumentError("unknown mode '" + name +
                      "' (expected baseline, doc, corpus or both)");
}

bool UsesDocumentLevel(Mode mode) { return mode == Mode::kDocument || mode == Mode::kBoth; }
bool UsesCorpusLevel(Mode mode) { return mode == Mode::kCorpus || mode == Mode::kBoth; }

void ModelConfig::Validate() const {
  encoder.Validate();
  if (attention_dim <= 0 || upper_hidden <= 0) {
    throw ArgumentError("model: attention and upper hidden sizes must be positive");
  }
}

Tagger::Tagger(const ModelConfig& config, const TagScheme& scheme, int word_vocab_size,
               int char_vocab_size)
    : config_(config),
      scheme_(scheme),
      encoder_(config.encoder, word_vocab_size, char_vocab_size),
      upper_("upper", 3 * config.encoder.output_dim(), config.upper_hidden),
      crf_("crf", 2 * config.upper_hidden, scheme) {
  config_.Validate();
}

void Tagger::Init(Rng& rng, const Matrix* pretrained) {
  encoder_.Init(rng, pretrained);
  upper_.Init(rng);
  crf_.Init(rng);
}

void Tagger::AttachAttention(Mode mode, Rng& rng) {
  if (UsesDocumentLevel(mode) && !doc_level_) {
    doc_level_ = std::make_unique<GatedAttention>("doc", dim(), config_.attention_dim);
    doc_level_->Init(rng);
  }
  if (UsesCorpusLevel(mode) && !corpus_level_) {
    corpus_level_ = std::make_unique<GatedAttention>("corpus", dim(), config_.attention_dim);
    corpus_level_->Init(rng);
  }
}

Var Tagger::Level(GatedAttention* level, Var local, const std::vector<Var>& evidence,
                  std::vector<std::vector<double>>& alphas) {
  Tape& tape = *local.tape;
  const Eigen::Index n = local.rows();
  if (level == nullptr) return tape.Constant(Matrix::Zero(n, dim()));
  if (!evidence.empty() && static_cast<Eigen::Index>(evidence.size()) != n) {
    throw DimensionError("tagger: " + std::to_string(evidence.size()) +
                         " evidence entries for " + std::to_string(n) + " tokens");
  }
  std::vector<Var> summaries;
  alphas.assign(static_cast<std::size_t>(n), {});
  for (Eigen::Index i = 0; i < n; ++i) {
    const Var ev = evidence.empty() ? Var{} : evidence[static_cast<std::size_t>(i)];
    Attended a = level->Attend(SliceRows(local, i, 1), ev);
    summaries.push_back(a.summary);
    alphas[static_cast<std::size_t>(i)] = std::move(a.alphas);
  }
  return level->Gate(local, ConcatRows(summaries));
}

SentenceOutput Tagger::Forward(Var local, const SentenceEvidence& evidence) {
  if (local.cols() != dim()) {
    throw DimensionError("tagger: local representation " + ShapeString(local.value()) +
                         " vs width " + std::to_string(dim()));
  }
  SentenceOutput out;
  Var d = Level(doc_level_.get(), local, evidence.doc, out.doc_alphas);
  Var c = Level(corpus_level_.get(), local, evidence.corpus, out.corpus_alphas);
  Var fused = upper_.Forward(ConcatCols({local, d, c}));
  out.emissions = crf_.Emissions(fused);
  return out;
}

Var Tagger::Loss(const SentenceOutput& out, std::span<const int> gold) {
  return crf_.Loss(out.emissions, gold);
}

std::vector<int> Tagger::Decode(const SentenceOutput& out) const {
  return crf_.Decode(out.emissions.value(), config_.bio_mask).tags;
}

std::vector<Parameter*> Tagger::params() {
  std::vector<Parameter*> out = encoder_.params();
  for (Parameter* p : upper_.params()) out.push_back(p);
  for (Parameter* p : crf_.params()) out.push_back(p);
  if (doc_level_) {
    for (Parameter* p : doc_level_->params()) out.push_back(p);
  }
  if (corpus_level_) {
    for (Parameter* p : corpus_level_->params()) out.push_back(p);
  }
  return out;
}

}  // namespace gner
