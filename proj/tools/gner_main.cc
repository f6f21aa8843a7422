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

// gner command-line tool: train, tag, eval, stats, lda.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gner/checkpoint.h"
#include "gner/corpus.h"
#include "gner/errors.h"
#include "gner/eval.h"
#include "gner/lda.h"
#include "gner/retrieval.h"
#include "gner/train.h"

namespace gner::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct InputOptions {
  int word_column = 0;
  int tag_column = -1;  // negative counts from the last column
  int split_block = 30;
  std::uint64_t split_seed = 1;
};

struct RunConfig {
  std::string train_path, dev_path, test_path, embeddings_path;
  std::string out_dir = "gner_out";
  std::string mode = "both";
  int runs = 1;
  TrainConfig train;
  InputOptions input;
};

void Warn(const std::string& message) { std::cerr << "gner: warning: " << message << "\n"; }

void AddInputFlags(CLI::App* app, InputOptions& in) {
  app->add_option("--word-column", in.word_column, "Zero-based column of the token surface")
      ->capture_default_str();
  app->add_option("--tag-column", in.tag_column,
                  "Zero-based column of the tag; negative counts from the last column")
      ->capture_default_str();
  app->add_option("--split-block", in.split_block,
                  "Regroup files without -DOCSTART- markers into random documents of this "
                  "many sentences; 0 keeps one document")
      ->capture_default_str();
  app->add_option("--split-seed", in.split_seed, "Seed of the regrouping shuffle")
      ->capture_default_str();
}

void AddRetrievalFlags(CLI::App* app, RetrievalConfig& r) {
  app->add_option("--doc-evidence-cap", r.doc_cap, "Supporting sentences per token, same document")
      ->capture_default_str();
  app->add_option("--corpus-evidence-cap", r.corpus_cap,
                  "Supporting sentences per token, same topic cluster")
      ->capture_default_str();
  app->add_option("--n-topics", r.lda.n_topics, "LDA topics (document clusters)")
      ->capture_default_str();
  app->add_option("--lda-alpha", r.lda.alpha, "LDA document-topic prior; <= 0 means 50/n_topics")
      ->capture_default_str();
  app->add_option("--lda-beta", r.lda.beta, "LDA topic-word prior")->capture_default_str();
  app->add_option("--lda-iterations", r.lda.iterations, "Gibbs sweeps")->capture_default_str();
  app->add_option("--lda-seed", r.lda.seed, "Gibbs sampler seed")->capture_default_str();
  app->add_option("--lda-stopwords", r.lda.stopword_top_k,
                  "Most document-frequent surfaces excluded from LDA")
      ->capture_default_str();
}

void AddModelFlags(CLI::App* app, TrainConfig& t) {
  EncoderConfig& e = t.model.encoder;
  app->add_option("--word-dim", e.word_dim, "Word embedding size")->capture_default_str();
  app->add_option("--char-dim", e.char_dim, "Character embedding size")->capture_default_str();
  app->add_option("--char-filters", e.char_filters, "CharCNN filters per width")
      ->capture_default_str();
  app->add_option("--char-widths", e.char_widths, "CharCNN filter widths")
      ->capture_default_str()
      ->delimiter(',');
  app->add_option("--lstm-hidden", e.lstm_hidden, "Lower Bi-LSTM hidden size per direction")
      ->capture_default_str();
  app->add_option("--dropout", e.dropout, "Lower Bi-LSTM dropout rate")->capture_default_str();
  app->add_option("--dropout-input", e.dropout_input, "Apply dropout to the lower Bi-LSTM input")
      ->capture_default_str();
  app->add_option("--dropout-output", e.dropout_output,
                  "Apply dropout to the lower Bi-LSTM output")
      ->capture_default_str();
  app->add_option("--attention-dim", t.model.attention_dim, "Attention hidden size")
      ->capture_default_str();
  app->add_option("--upper-hidden", t.model.upper_hidden,
                  "Upper Bi-LSTM hidden size per direction")
      ->capture_default_str();
  app->add_flag("--bio-mask", t.model.bio_mask, "Forbid illegal BIO bigrams when decoding")
      ->capture_default_str();
}

// Number of whitespace-separated fields on the first token line.
std::size_t CountColumns(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(path, 0, "cannot open file");
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::vector<std::string> parts;
    for (std::string f; fields >> f;) parts.push_back(f);
    if (parts.empty() || parts[0] == "-DOCSTART-") continue;
    return parts.size();
  }
  return 0;
}

std::size_t ResolveColumn(int column, std::size_t columns) {
  if (column >= 0) return static_cast<std::size_t>(column);
  const auto back = static_cast<std::size_t>(-column);
  return columns >= back ? columns - back : 0;
}

Corpus LoadInput(const std::string& path, const InputOptions& in,
                 const TagScheme& scheme = TagScheme()) {
  const std::size_t columns = CountColumns(path);
  Corpus corpus;
  if (columns == 0) return corpus;
  const std::size_t tag_column =
      columns == 1 ? kNoTagColumn : ResolveColumn(in.tag_column, columns);
  corpus = LoadConll(path, static_cast<std::size_t>(in.word_column), tag_column, scheme);
  if (corpus.repaired_tags > 0) {
    Warn(path + ": repaired " + std::to_string(corpus.repaired_tags) + " ill-formed BIO tags");
  }
  if (in.split_block > 0 && corpus.documents.size() == 1 &&
      corpus.NumSentences() > static_cast<std::size_t>(in.split_block)) {
    corpus = SplitIntoDocuments(corpus, static_cast<std::size_t>(in.split_block), in.split_seed);
  }
  return corpus;
}

void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path);
  out << text;
}

json RecordJson(const Corpus& corpus, const AttentionRecord& r) {
  json refs = json::array();
  for (const TokenRef& ref : r.refs) {
    refs.push_back({{"doc", ref.doc}, {"sent", ref.sent}, {"pos", ref.pos},
                    {"surface", corpus.sentence(ref.doc, ref.sent).tokens[ref.pos].surface}});
  }
  return {{"doc", r.query.doc},
          {"sent", r.query.sent},
          {"pos", r.query.pos},
          {"surface", r.surface},
          {"level", r.level == EvidenceLevel::kDocument ? "document" : "corpus"},
          {"refs", refs},
          {"alphas", r.alphas}};
}

void WriteTagged(std::ostream& out, const Corpus& corpus, const TagTable& pred) {
  const TagScheme& s = corpus.tag_set;
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    out << "-DOCSTART- O O\n\n";
    for (std::size_t i = 0; i < corpus.documents[d].sentences.size(); ++i) {
      const Sentence& sent = corpus.sentence(d, i);
      for (std::size_t t = 0; t < sent.tokens.size(); ++t) {
        out << sent.tokens[t].surface << ' ' << s.Name(sent.tokens[t].gold_tag) << ' '
            << s.Name(pred[d][i][t]) << '\n';
      }
      out << '\n';
    }
  }
}

std::optional<PropagationLevel> ParsePropagation(const std::string& name) {
  if (name == "none") return std::nullopt;
  if (name == "document") return PropagationLevel::kDocument;
  if (name == "corpus") return PropagationLevel::kCorpus;
  throw ArgumentError("unknown --propagate level '" + name + "'");
}

std::string config_flag_value;  // read by ExpandConfig before parsing

// --config names an INI file of "flag-name = value" lines, optionally under a
// [subcommand] section. Values are injected ahead of the command line for
// every flag the command line does not set, so flags override the file and the
// file overrides defaults.
void AddConfigFlag(CLI::App* app) {
  app->add_option("--config", config_flag_value,
                  "INI file of flag-name = value lines; flags given here override it");
}

bool SetsFlag(const std::vector<std::string>& args, const std::string& flag) {
  for (const std::string& a : args) {
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  }
  return false;
}

std::vector<std::string> ExpandConfig(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty()) return args;
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  if (!fs::is_regular_file(path)) throw ArgumentError("config file '" + path + "' not found");
  const std::string& command = args[0];
  std::vector<std::string> injected;
  for (const CLI::ConfigItem& item : CLI::ConfigINI().from_file(path)) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    if (!item.parents.empty() && (item.parents.size() != 1 || item.parents[0] != command)) {
      continue;
    }
    const std::string flag = "--" + item.name;
    if (flag == "--config" || SetsFlag(args, flag)) continue;
    std::string value;
    for (std::size_t i = 0; i < item.inputs.size(); ++i) {
      value += (i > 0 ? "," : "") + item.inputs[i];
    }
    injected.push_back(flag + "=" + value);
  }
  args.insert(args.begin() + 1, injected.begin(), injected.end());
  return args;
}

int CmdTrain(RunConfig& cfg) {
  cfg.train.mode = ParseMode(cfg.mode);
  if (cfg.runs < 1) throw ArgumentError("--runs must be >= 1");
  const Corpus train = LoadInput(cfg.train_path, cfg.input);
  const Corpus dev = cfg.dev_path.empty() ? Corpus() : LoadInput(cfg.dev_path, cfg.input);
  std::optional<Corpus> test;
  if (!cfg.test_path.empty()) test = LoadInput(cfg.test_path, cfg.input);

  std::optional<EmbeddingFile> embeddings;
  if (!cfg.embeddings_path.empty()) {
    if (fs::exists(cfg.embeddings_path)) {
      embeddings = ReadEmbeddingFile(cfg.embeddings_path,
                                     static_cast<std::size_t>(cfg.train.model.encoder.word_dim));
    } else {
      Warn("embeddings file '" + cfg.embeddings_path +
           "' not found; using randomly initialized embeddings");
    }
  }
  fs::create_directories(cfg.out_dir);

  std::vector<double> dev_f1, test_f1;
  json runs = json::array();
  for (int run = 0; run < cfg.runs; ++run) {
    TrainConfig tc = cfg.train;
    tc.seed = cfg.train.seed + static_cast<std::uint64_t>(run);
    const fs::path dir =
        cfg.runs == 1 ? fs::path(cfg.out_dir) : fs::path(cfg.out_dir) / ("run" + std::to_string(run + 1));
    fs::create_directories(dir);

    TrainOptions options;
    if (embeddings) options.embeddings = &*embeddings;
    if (test) options.vocabulary_corpora.push_back(&*test);
    options.on_epoch = [&](const EpochRecord& e) {
      std::fprintf(stderr, "run %d epoch %d loss %.4f dev_f1 %.2f\n", run + 1, e.epoch,
                   e.train_loss, e.dev_f1);
    };
    const TrainResult r = Train(train, dev, tc, options);
    if (embeddings) {
      std::fprintf(stderr, "embedding coverage %.2f%%\n", 100.0 * r.embedding_coverage);
    }
    WriteFileBytes((dir / "best.ckpt").string(), r.best_checkpoint);
    WriteFileBytes((dir / "final.ckpt").string(), r.final_checkpoint);
    if (!r.phase1_checkpoint.empty()) {
      WriteFileBytes((dir / "phase1.ckpt").string(), r.phase1_checkpoint);
    }
    WriteText((dir / "curve.csv").string(), CurveCsv(r.curve));

    json summary = {{"seed", tc.seed},
                    {"best_epoch", r.best_epoch},
                    {"best_dev_f1", r.best_dev_f1},
                    {"phase1_best_epoch", r.phase1_best_epoch},
                    {"phase1_best_dev_f1", r.phase1_best_dev_f1}};
    dev_f1.push_back(r.best_dev_f1);
    ModelBundle bundle = ParseCheckpoint(r.best_checkpoint);
    if (dev.NumSentences() > 0) {
      const EvalReport report = Evaluate(TagCorpus(bundle, dev), dev);
      WriteText((dir / "dev_report.json").string(), report.ToJson().dump(2) + "\n");
      WriteText((dir / "dev_report.txt").string(), report.ToConllevalText());
    }
    if (test) {
      const EvalReport report = Evaluate(TagCorpus(bundle, *test), *test);
      WriteText((dir / "test_report.json").string(), report.ToJson().dump(2) + "\n");
      WriteText((dir / "test_report.txt").string(), report.ToConllevalText());
      summary["test_f1"] = report.f1();
      test_f1.push_back(report.f1());
    }
    runs.push_back(summary);
  }

  json out = {{"mode", ModeName(cfg.train.mode)}, {"runs", runs}};
  const RunStats dev_stats = Summarize(dev_f1);
  out["dev_f1"] = {{"mean", dev_stats.mean}, {"max", dev_stats.max}};
  if (!test_f1.empty()) {
    const RunStats test_stats = Summarize(test_f1);
    out["test_f1"] = {{"mean", test_stats.mean}, {"max", test_stats.max}};
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

int CmdTag(const std::string& checkpoint, const std::string& input, const std::string& output,
           const std::string& attention_out, const InputOptions& in) {
  ModelBundle bundle = ParseCheckpoint(ReadFileBytes(checkpoint));
  const Corpus corpus = LoadInput(input, in, bundle.tagger->scheme());
  std::ofstream attention_file;
  AttentionSink sink;
  if (!attention_out.empty()) {
    attention_file.open(attention_out);
    if (!attention_file) throw ArgumentError("cannot write " + attention_out);
    sink = [&](const AttentionRecord& r) { attention_file << RecordJson(corpus, r).dump() << "\n"; };
  }
  const TagTable pred = TagCorpus(bundle, corpus, sink);
  if (output.empty() || output == "-") {
    WriteTagged(std::cout, corpus, pred);
  } else {
    std::ofstream out(output);
    if (!out) throw ArgumentError("cannot write " + output);
    WriteTagged(out, corpus, pred);
  }
  return 0;
}

int CmdEval(const std::string& checkpoint, const std::string& input,
            const std::string& propagate, const std::string& json_out,
            const InputOptions& in) {
  const std::optional<PropagationLevel> level = ParsePropagation(propagate);
  Corpus gold;
  TagTable pred;
  if (!checkpoint.empty()) {
    ModelBundle bundle = ParseCheckpoint(ReadFileBytes(checkpoint));
    gold = LoadInput(input, in, bundle.tagger->scheme());
    pred = TagCorpus(bundle, gold);
  } else {
    // A tagged file: gold in the second-to-last column, prediction in the last.
    const std::size_t columns = CountColumns(input);
    if (columns < 3) throw ArgumentError(input + ": expected 'word ... gold pred' lines");
    InputOptions gold_in = in;
    gold_in.tag_column = static_cast<int>(columns) - 2;
    InputOptions pred_in = in;
    pred_in.tag_column = static_cast<int>(columns) - 1;
    gold = LoadInput(input, gold_in);
    pred = GoldTags(LoadInput(input, pred_in));
  }
  if (level) pred = MajorityVotePropagate(gold, pred, *level);
  const EvalReport report = Evaluate(pred, gold);
  std::cout << report.ToConllevalText();
  if (!json_out.empty()) WriteText(json_out, report.ToJson().dump(2) + "\n");
  return 0;
}

int CmdStats(const std::string& input, const InputOptions& in) {
  const Corpus corpus = LoadInput(input, in);
  const CorpusStats s = ComputeCorpusStats(corpus);
  json out = {{"documents", corpus.documents.size()},
              {"sentences", corpus.NumSentences()},
              {"tokens", corpus.NumTokens()},
              {"mentions", s.mentions},
              {"documents_with_mentions", s.documents_with_mentions},
              {"documents_with_repeats", s.documents_with_repeats},
              {"repeat_rate", s.repeat_rate},
              {"type_consistency", s.type_consistency ? json(*s.type_consistency) : json()}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int CmdLda(const std::string& input, const LdaOptions& options, const InputOptions& in) {
  const Corpus corpus = LoadInput(input, in);
  if (corpus.documents.empty()) return 0;
  const TopicModel model = FitLda(corpus, options);
  for (const std::string& w : model.warnings) Warn(w);
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    const int cluster = model.cluster_of_doc[d];
    std::cout << corpus.documents[d].doc_id << '\t' << cluster << '\t';
    const std::vector<std::string> words = model.TopWords(cluster, 10);
    for (std::size_t i = 0; i < words.size(); ++i) std::cout << (i > 0 ? " " : "") << words[i];
    std::cout << '\n';
  }
  return 0;
}

int Main(int argc, char** argv) {
  CLI::App app{"gner: named entity tagging with document- and corpus-level attention"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  RunConfig cfg;
  CLI::App* train = app.add_subcommand("train", "Train a model (pretraining, then fine-tuning)");
  AddConfigFlag(train);
  train->add_option("--train", cfg.train_path, "Training corpus (CoNLL)")->required();
  train->add_option("--dev", cfg.dev_path, "Dev corpus for model selection")->capture_default_str();
  train->add_option("--test", cfg.test_path, "Test corpus scored with the best checkpoint")
      ->capture_default_str();
  train->add_option("--embeddings", cfg.embeddings_path,
                    "word2vec text embeddings; missing file means random init")
      ->capture_default_str();
  train->add_option("--out", cfg.out_dir, "Output directory")->capture_default_str();
  train->add_option("--mode", cfg.mode, "baseline, doc, corpus or both")->capture_default_str();
  train->add_option("--pretrain-epochs", cfg.train.pretrain_epochs, "Phase-1 epochs")
      ->capture_default_str();
  train->add_option("--finetune-epochs", cfg.train.finetune_epochs,
                    "Phase-2 epochs (attention attached)")
      ->capture_default_str();
  train->add_option("--lr", cfg.train.sgd.learning_rate, "SGD learning rate")
      ->capture_default_str();
  train->add_option("--clip-norm", cfg.train.sgd.clip_norm,
                    "Global gradient norm cap; <= 0 disables")
      ->capture_default_str();
  train->add_option("--seed", cfg.train.seed, "Seed of the first run")->capture_default_str();
  train->add_option("--runs", cfg.runs, "Runs with consecutive seeds; reports mean and max")
      ->capture_default_str();
  train->add_flag("--evidence-grad", cfg.train.evidence_grad,
                  "Backpropagate into document-level evidence encodings")
      ->capture_default_str();
  AddModelFlags(train, cfg.train);
  AddRetrievalFlags(train, cfg.train.retrieval);
  AddInputFlags(train, cfg.input);

  std::string checkpoint, input, output, attention_out, propagate = "none", json_out;
  InputOptions tag_in, eval_in, stats_in, lda_in;
  CLI::App* tag = app.add_subcommand("tag", "Tag a corpus; writes 'word gold pred' lines");
  AddConfigFlag(tag);
  tag->add_option("--checkpoint", checkpoint, "Model checkpoint")->required();
  tag->add_option("--input", input, "Corpus to tag (CoNLL)")->required();
  tag->add_option("--output", output, "Output path; '-' or empty for stdout")
      ->capture_default_str();
  tag->add_option("--attention-out", attention_out, "JSON lines of attention weights")
      ->capture_default_str();
  AddInputFlags(tag, tag_in);

  CLI::App* eval = app.add_subcommand(
      "eval", "Score a checkpoint on a corpus, or a tagged 'word gold pred' file");
  AddConfigFlag(eval);
  eval->add_option("--checkpoint", checkpoint, "Model checkpoint; omit to score a tagged file")
      ->capture_default_str();
  eval->add_option("--input", input, "Gold corpus or tagged file")->required();
  eval->add_option("--propagate", propagate, "Majority voting first: none, document or corpus")
      ->capture_default_str();
  eval->add_option("--json", json_out, "Also write the report as JSON here")
      ->capture_default_str();
  AddInputFlags(eval, eval_in);

  CLI::App* stats = app.add_subcommand("stats", "Name repetition and type consistency");
  AddConfigFlag(stats);
  stats->add_option("--input", input, "Corpus (CoNLL)")->required();
  AddInputFlags(stats, stats_in);

  LdaOptions lda_options;
  CLI::App* lda = app.add_subcommand("lda", "Cluster documents; TSV of doc_id, cluster, top words");
  AddConfigFlag(lda);
  lda->add_option("--input", input, "Corpus (CoNLL)")->required();
  lda->add_option("--n-topics", lda_options.n_topics, "Topics")->capture_default_str();
  lda->add_option("--alpha", lda_options.alpha, "Document-topic prior; <= 0 means 50/n_topics")
      ->capture_default_str();
  lda->add_option("--beta", lda_options.beta, "Topic-word prior")->capture_default_str();
  lda->add_option("--iterations", lda_options.iterations, "Gibbs sweeps")->capture_default_str();
  lda->add_option("--seed", lda_options.seed, "Sampler seed")->capture_default_str();
  lda->add_option("--stopwords", lda_options.stopword_top_k,
                  "Most document-frequent surfaces excluded")
      ->capture_default_str();
  AddInputFlags(lda, lda_in);

  try {
    std::vector<std::string> args = ExpandConfig(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "gner: error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (*train) return CmdTrain(cfg);
    if (*tag) return CmdTag(checkpoint, input, output, attention_out, tag_in);
    if (*eval) return CmdEval(checkpoint, input, propagate, json_out, eval_in);
    if (*stats) return CmdStats(input, stats_in);
    if (*lda) return CmdLda(input, lda_options, lda_in);
  } catch (const std::exception& e) {
    std::cerr << "gner: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace
}  // namespace gner::cli

int main(int argc, char** argv) { return gner::cli::Main(argc, argv); }
