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

#include "gner/train.h"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include "gner/errors.h"

namespace gner {

void TrainConfig::Validate() const {
  model.Validate();
  if (pretrain_epochs < 0 || finetune_epochs < 0) {
    throw ArgumentError("train: epoch counts must be >= 0");
  }
  if (sgd.learning_rate < 0.0) throw ArgumentError("train: learning rate must be >= 0");
  if (sgd.clip_norm <= 0.0) throw ArgumentError("train: clip norm must be positive");
}

PreparedSplit PrepareSplit(Corpus corpus, const Vocabulary& words, const Vocabulary& chars,
                           bool doc_level, bool corpus_level,
                           const RetrievalConfig& retrieval) {
  PreparedSplit split;
  IndexCorpus(corpus, words, chars);
  split.corpus = std::move(corpus);
  split.doc_level = doc_level;
  split.corpus_level = corpus_level;
  if (corpus_level && !split.corpus.documents.empty()) {
    split.topics = FitLda(split.corpus, retrieval.lda);
  }
  split.evidence =
      BuildEvidenceTable(split.corpus, retrieval, doc_level,
                         corpus_level && split.topics.has_value(),
                         split.topics ? &*split.topics : nullptr);
  return split;
}

EncodingCache EncodeSplit(Encoder& encoder, const Corpus& corpus) {
  EncodingCache cache(corpus.documents.size());
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    for (const Sentence& s : corpus.documents[d].sentences) {
      cache[d].push_back(encoder.EncodeConstant(s));
    }
  }
  return cache;
}

namespace {

Var EvidenceRows(Tape& tape, const std::vector<TokenRef>& refs, const EncodingCache& cache) {
  if (refs.empty()) return Var{};
  const Eigen::Index dim = cache[refs[0].doc][refs[0].sent].cols();
  Matrix m(static_cast<Eigen::Index>(refs.size()), dim);
  for (std::size_t k = 0; k < refs.size(); ++k) {
    m.row(static_cast<Eigen::Index>(k)) =
        cache[refs[k].doc][refs[k].sent].row(static_cast<Eigen::Index>(refs[k].pos));
  }
  return tape.Constant(std::move(m));
}

void CheckSplitSupports(const Tagger& tagger, const PreparedSplit& split) {
  if (tagger.has_document_level() && !split.doc_level) {
    throw ArgumentError("split was prepared without document-level evidence");
  }
  if (tagger.has_corpus_level() && !split.corpus_level) {
    throw ArgumentError("split was prepared without corpus-level evidence");
  }
}

std::vector<int> GoldOf(const Sentence& s) {
  std::vector<int> tags;
  tags.reserve(s.tokens.size());
  for (const Token& t : s.tokens) tags.push_back(t.gold_tag);
  return tags;
}

// Independent streams derived from the run seed.
std::uint64_t StreamSeed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

SentenceEvidence GatherEvidence(Tape& tape, const Tagger& tagger, const PreparedSplit& split,
                                const EncodingCache& cache, std::size_t doc, std::size_t sent) {
  SentenceEvidence ev;
  const auto& row = split.evidence.tokens.at(doc).at(sent);
  if (tagger.has_document_level()) {
    for (const TokenEvidence& t : row) ev.doc.push_back(EvidenceRows(tape, t.doc, cache));
  }
  if (tagger.has_corpus_level()) {
    for (const TokenEvidence& t : row) ev.corpus.push_back(EvidenceRows(tape, t.corpus, cache));
  }
  return ev;
}

TagTable Predict(Tagger& tagger, const PreparedSplit& split, const AttentionSink& sink) {
  CheckSplitSupports(tagger, split);
  const EncodingCache cache = EncodeSplit(tagger.encoder(), split.corpus);
  TagTable out(split.corpus.documents.size());
  for (std::size_t d = 0; d < split.corpus.documents.size(); ++d) {
    const Document& doc = split.corpus.documents[d];
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      Tape tape(/*record=*/false);
      Var local = tape.Constant(cache[d][s]);
      const SentenceEvidence ev = GatherEvidence(tape, tagger, split, cache, d, s);
      const SentenceOutput result = tagger.Forward(local, ev);
      out[d].push_back(tagger.Decode(result));
      if (!sink) continue;
      const auto& row = split.evidence.tokens[d][s];
      for (std::size_t p = 0; p < row.size(); ++p) {
        const std::string& surface = doc.sentences[s].tokens[p].surface;
        if (tagger.has_document_level() && !row[p].doc.empty()) {
          sink(AttentionRecord{TokenRef{d, s, p}, surface, EvidenceLevel::kDocument,
                               row[p].doc, result.doc_alphas[p]});
        }
        if (tagger.has_corpus_level() && !row[p].corpus.empty()) {
          sink(AttentionRecord{TokenRef{d, s, p}, surface, EvidenceLevel::kCorpus,
                               row[p].corpus, result.corpus_alphas[p]});
        }
      }
    }
  }
  return out;
}

TagTable TagCorpus(ModelBundle& bundle, const Corpus& corpus, const AttentionSink& sink) {
  Tagger& tagger = *bundle.tagger;
  const PreparedSplit split =
      PrepareSplit(corpus, bundle.words, bundle.chars, tagger.has_document_level(),
                   tagger.has_corpus_level(), bundle.retrieval);
  return Predict(tagger, split, sink);
}

TrainResult Train(const Corpus& train, const Corpus& dev, const TrainConfig& config,
                  const TrainOptions& options) {
  config.Validate();
  if (train.NumSentences() == 0) throw ArgumentError("train: training corpus is empty");
  if (train.tag_set.Hash() != dev.tag_set.Hash()) {
    throw ArgumentError("train: training and dev tag sets differ");
  }

  std::vector<const Corpus*> others = options.vocabulary_corpora;
  others.push_back(&dev);
  const Vocabulary words = BuildWordVocabulary(train, others, options.embeddings);
  const Vocabulary chars = BuildCharVocabulary(train);

  Rng init_rng(StreamSeed(config.seed, 0));
  Rng shuffle_rng(StreamSeed(config.seed, 1));
  Rng dropout_rng(StreamSeed(config.seed, 2));
  Rng attach_rng(StreamSeed(config.seed, 3));

  TrainResult result;
  Tagger tagger(config.model, train.tag_set, words.size(), chars.size());
  if (options.embeddings != nullptr) {
    const EmbeddingTable table = LoadEmbeddings(*options.embeddings, words, init_rng);
    result.embedding_coverage = table.coverage;
    tagger.Init(init_rng, &table.table);
  } else {
    tagger.Init(init_rng);
  }

  const bool doc_level = UsesDocumentLevel(config.mode);
  const bool corpus_level = UsesCorpusLevel(config.mode);
  const PreparedSplit train_split =
      PrepareSplit(train, words, chars, doc_level, corpus_level, config.retrieval);
  const PreparedSplit dev_split =
      PrepareSplit(dev, words, chars, doc_level, corpus_level, config.retrieval);
  const TopicModel* topics = train_split.topics ? &*train_split.topics : nullptr;
  const bool has_dev = dev_split.corpus.NumSentences() > 0;

  std::vector<std::size_t> order(train_split.corpus.documents.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= config.total_epochs(); ++epoch) {
    if (epoch == config.pretrain_epochs + 1) tagger.AttachAttention(config.mode, attach_rng);
    std::vector<Parameter*> params = tagger.params();
    const bool doc_attached = tagger.has_document_level();

    EncodingCache corpus_cache;
    if (tagger.has_corpus_level()) corpus_cache = EncodeSplit(tagger.encoder(), train_split.corpus);

    shuffle_rng.Shuffle(order);
    double loss_sum = 0.0;
    std::size_t sentences = 0;
    for (std::size_t d : order) {
      const Document& doc = train_split.corpus.documents[d];
      if (doc.sentences.empty()) continue;
      Tape tape;
      std::vector<Var> local;
      for (const Sentence& s : doc.sentences) {
        local.push_back(tagger.encoder().Encode(tape, s, /*train=*/true, dropout_rng));
      }
      // Document-level evidence only reads this document's sentences.
      EncodingCache doc_cache;
      if (doc_attached && !config.evidence_grad) {
        doc_cache.resize(train_split.corpus.documents.size());
        for (const Sentence& s : doc.sentences) {
          doc_cache[d].push_back(tagger.encoder().EncodeConstant(s));
        }
      }
      std::vector<Var> losses;
      for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
        SentenceEvidence ev;
        const auto& row = train_split.evidence.tokens[d][s];
        if (doc_attached) {
          for (const TokenEvidence& t : row) {
            if (t.doc.empty()) {
              ev.doc.push_back(Var{});
            } else if (config.evidence_grad) {
              std::vector<Var> rows;
              for (const TokenRef& r : t.doc) {
                rows.push_back(SliceRows(local[r.sent], static_cast<Eigen::Index>(r.pos), 1));
              }
              ev.doc.push_back(ConcatRows(rows));
            } else {
              ev.doc.push_back(EvidenceRows(tape, t.doc, doc_cache));
            }
          }
        }
        if (tagger.has_corpus_level()) {
          for (const TokenEvidence& t : row) {
            ev.corpus.push_back(EvidenceRows(tape, t.corpus, corpus_cache));
          }
        }
        const SentenceOutput out = tagger.Forward(local[s], ev);
        const std::vector<int> gold = GoldOf(doc.sentences[s]);
        losses.push_back(tagger.Loss(out, gold));
      }
      Var batch_loss = Scale(Sum(ConcatRows(losses)), 1.0 / static_cast<double>(losses.size()));
      loss_sum += batch_loss.value()(0, 0) * static_cast<double>(losses.size());
      sentences += losses.size();
      tape.Backward(batch_loss);
      SgdStep(params, config.sgd);
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = sentences > 0 ? loss_sum / static_cast<double>(sentences) : 0.0;
    if (has_dev) {
      const TagTable pred = Predict(tagger, dev_split);
      record.dev_f1 = Evaluate(pred, dev_split.corpus, options.dev_filter).f1();
    }
    result.curve.push_back(record);
    if (options.on_epoch) options.on_epoch(record);

    const Mode saved_mode = tagger.has_document_level() || tagger.has_corpus_level()
                                ? config.mode
                                : Mode::kBaseline;
    const bool improved = result.best_epoch == 0 || record.dev_f1 > result.best_dev_f1 ||
                          (!has_dev && epoch == config.total_epochs());
    const bool in_phase1 = epoch <= config.pretrain_epochs;
    const bool phase1_improved =
        in_phase1 && (result.phase1_best_epoch == 0 || record.dev_f1 > result.phase1_best_dev_f1 ||
                      (!has_dev && epoch == config.pretrain_epochs));
    const bool last = epoch == config.total_epochs();
    if (improved || phase1_improved || last) {
      const std::string bytes =
          SerializeCheckpoint(tagger, saved_mode, config.retrieval, words, chars, topics);
      if (improved) {
        result.best_epoch = epoch;
        result.best_dev_f1 = record.dev_f1;
        result.best_checkpoint = bytes;
      }
      if (phase1_improved) {
        result.phase1_best_epoch = epoch;
        result.phase1_best_dev_f1 = record.dev_f1;
        result.phase1_checkpoint = bytes;
      }
      if (last) result.final_checkpoint = bytes;
    }
  }
  if (config.total_epochs() == 0) {
    result.final_checkpoint =
        SerializeCheckpoint(tagger, Mode::kBaseline, config.retrieval, words, chars, topics);
    result.best_checkpoint = result.final_checkpoint;
  }
  return result;
}

RunStats Summarize(const std::vector<double>& f1) {
  RunStats stats;
  stats.f1 = f1;
  if (f1.empty()) return stats;
  stats.mean = std::accumulate(f1.begin(), f1.end(), 0.0) / static_cast<double>(f1.size());
  stats.max = *std::max_element(f1.begin(), f1.end());
  return stats;
}

std::string CurveCsv(const std::vector<EpochRecord>& curve) {
  std::string out = "epoch,train_loss,dev_f1\n";
  char buf[96];
  for (const EpochRecord& r : curve) {
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%.4f\n", r.epoch, r.train_loss, r.dev_f1);
    out += buf;
  }
  return out;
}

}  // namespace gner
