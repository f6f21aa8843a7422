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

// Tagged corpora: documents of sentences of tokens, BIO tag sets,
// vocabularies, CoNLL column I/O and word2vec-style embedding files.

#ifndef GNER_CORPUS_H_
#define GNER_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "gner/rng.h"
#include "gner/tensor.h"

namespace gner {

// BIO tags over a list of entity types. Id 0 is "O"; type k owns B at
// 2k+1 and I at 2k+2. The CRF adds START = size() and STOP = size() + 1,
// which never appear as token tags.
class TagScheme {
 public:
  explicit TagScheme(std::vector<std::string> entity_types = {"PER", "ORG",
                                                              "LOC", "MISC"});

  int size() const { return static_cast<int>(tags_.size()); }
  int start_id() const { return size(); }
  int stop_id() const { return size() + 1; }
  static constexpr int kOutside = 0;

  // -1 when unknown.
  int Id(const std::string& tag) const;
  const std::string& Name(int id) const { return tags_.at(static_cast<std::size_t>(id)); }
  const std::vector<std::string>& tags() const { return tags_; }
  const std::vector<std::string>& entity_types() const { return types_; }

  bool IsBegin(int id) const { return id > 0 && id % 2 == 1; }
  bool IsInside(int id) const { return id > 0 && id % 2 == 0; }
  // Index into entity_types(), -1 for O.
  int TypeOf(int id) const { return id > 0 ? (id - 1) / 2 : -1; }
  int BeginOf(int type) const { return 2 * type + 1; }
  int InsideOf(int type) const { return 2 * type + 2; }

  // I-X may only follow B-X or I-X. `prev` may be start_id().
  bool Allowed(int prev, int next) const;

  std::uint64_t Hash() const;

 private:
  std::vector<std::string> types_;
  std::vector<std::string> tags_;
  std::unordered_map<std::string, int> ids_;
};

// String <-> id map. The first `reserved` entries are fixed at construction;
// Id() maps unknown strings to unk_id().
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> reserved, int unk_id);

  static Vocabulary Words();  // {"<unk>"}
  static Vocabulary Chars();  // {"<pad>", "<unk>"}

  // Adds `s` unless present; returns its id.
  int Add(const std::string& s);
  int Id(const std::string& s) const;
  bool Contains(const std::string& s) const { return ids_.count(s) > 0; }
  const std::string& Entry(int id) const { return entries_.at(static_cast<std::size_t>(id)); }
  int size() const { return static_cast<int>(entries_.size()); }
  int unk_id() const { return unk_id_; }
  std::size_t reserved() const { return reserved_; }
  const std::vector<std::string>& entries() const { return entries_; }

  std::uint64_t Hash() const;

 private:
  std::vector<std::string> entries_;
  std::unordered_map<std::string, int> ids_;
  std::size_t reserved_ = 0;
  int unk_id_ = 0;
};

inline constexpr int kPadChar = 0;
inline constexpr int kUnkChar = 1;

struct Token {
  std::string surface;
  int gold_tag = TagScheme::kOutside;
  int word_id = 0;
  std::vector<int> char_ids;
};

struct Sentence {
  std::vector<Token> tokens;
  std::size_t doc_index = 0;
  std::size_t sent_index = 0;
};

struct Document {
  std::string doc_id;
  std::vector<Sentence> sentences;
};

struct Corpus {
  std::vector<Document> documents;
  TagScheme tag_set;
  Vocabulary word_vocab = Vocabulary::Words();
  Vocabulary char_vocab = Vocabulary::Chars();
  // I-X tags rewritten to B-X at load.
  std::size_t repaired_tags = 0;

  std::size_t NumSentences() const;
  std::size_t NumTokens() const;
  const Sentence& sentence(std::size_t doc, std::size_t sent) const {
    return documents[doc].sentences[sent];
  }
};

// Predicted (or gold) tag ids laid out as [document][sentence][token].
using TagTable = std::vector<std::vector<std::vector<int>>>;

TagTable GoldTags(const Corpus& corpus);

// UTF-8 code points of `s`, each as its own byte string. Invalid bytes
// become single-byte entries.
std::vector<std::string> SplitChars(const std::string& s);

// ASCII and Latin-1 lowercasing.
std::string Lowercase(const std::string& s);

// Rewrites each I-X not preceded by B-X or I-X to B-X; returns the count.
std::size_t RepairBio(std::span<int> tags, const TagScheme& scheme);

// An entity span [begin, end) with its type index.
struct Entity {
  std::size_t begin = 0;
  std::size_t end = 0;
  int type = -1;

  friend bool operator==(const Entity&, const Entity&) = default;
  friend auto operator<=>(const Entity&, const Entity&) = default;
};

// conlleval chunking: an I-X that does not continue an X chunk opens one.
std::vector<Entity> ExtractEntities(std::span<const int> tags,
                                    const TagScheme& scheme);

// Passed as column_tag for untagged input; every gold tag is then O.
inline constexpr std::size_t kNoTagColumn = static_cast<std::size_t>(-1);

// Reads CoNLL columns. Blank lines end sentences; a line whose first column
// is -DOCSTART- starts a new document and is dropped. Word and char
// vocabularies are built from the file's own surfaces.
Corpus ParseConll(std::istream& in, const std::string& name,
                  std::size_t column_word, std::size_t column_tag,
                  const TagScheme& scheme = TagScheme());
Corpus LoadConll(const std::string& path, std::size_t column_word,
                 std::size_t column_tag, const TagScheme& scheme = TagScheme());

// "surface tag" lines with -DOCSTART- markers; LoadConll(.., 0, 1) reads it
// back.
void WriteConll(std::ostream& out, const Corpus& corpus);

// Replaces the corpus vocabularies and re-resolves every token id.
void IndexCorpus(Corpus& corpus, const Vocabulary& words,
                 const Vocabulary& chars);

// Shuffles all sentences with `seed` and regroups them into documents of
// `sentences_per_doc` (the last may be smaller).
Corpus SplitIntoDocuments(const Corpus& corpus, std::size_t sentences_per_doc,
                          std::uint64_t seed);

// Pretrained vectors from a word2vec text file; an optional "count dim"
// header line is skipped.
struct EmbeddingFile {
  std::size_t dim = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;
};

EmbeddingFile ReadEmbeddingFile(const std::string& path, std::size_t dim);

struct EmbeddingTable {
  Matrix table;
  // Fraction of non-reserved vocabulary rows filled from the file.
  double coverage = 0.0;
  std::size_t exact_matches = 0;
  std::size_t lowercase_matches = 0;
};

// Rows for vocabulary words come from the file (exact surface first, then
// lowercase); the rest are U(-sqrt(3/dim), sqrt(3/dim)).
EmbeddingTable LoadEmbeddings(const EmbeddingFile& file, const Vocabulary& vocab,
                              Rng& rng);
EmbeddingTable LoadEmbeddings(const std::string& path, std::size_t dim,
                              const Vocabulary& vocab, Rng& rng);
EmbeddingTable RandomEmbeddings(std::size_t dim, const Vocabulary& vocab, Rng& rng);

// Training surfaces, plus surfaces of `others` found in `embeddings`
// (exactly or lowercased). `embeddings` may be null.
Vocabulary BuildWordVocabulary(const Corpus& train,
                               std::span<const Corpus* const> others,
                               const EmbeddingFile* embeddings);
Vocabulary BuildCharVocabulary(const Corpus& train);

}  // namespace gner

#endif  // GNER_CORPUS_H_
