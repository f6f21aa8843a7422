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

#include "gner/corpus.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "gner/errors.h"

namespace gner {
namespace {

constexpr char kDocStart[] = "-DOCSTART-";

std::uint64_t Fnv1a(const std::vector<std::string>& items) {
  std::uint64_t h = 1469598103934665603ULL;
  for (const std::string& s : items) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0xff;
    h *= 1099511628211ULL;
  }
  return h;
}

std::vector<std::string> SplitWhitespace(const std::string& line) {
  std::vector<std::string> fields;
  std::istringstream in(line);
  std::string f;
  while (in >> f) fields.push_back(std::move(f));
  return fields;
}

void ResolveIds(Token& tok, const Vocabulary& words, const Vocabulary& chars) {
  tok.word_id = words.Id(tok.surface);
  tok.char_ids.clear();
  for (const std::string& c : SplitChars(tok.surface)) {
    tok.char_ids.push_back(chars.Id(c));
  }
}

}  // namespace

TagScheme::TagScheme(std::vector<std::string> entity_types)
    : types_(std::move(entity_types)) {
  tags_.push_back("O");
  for (const std::string& t : types_) {
    tags_.push_back("B-" + t);
    tags_.push_back("I-" + t);
  }
  for (std::size_t i = 0; i < tags_.size(); ++i) {
    ids_.emplace(tags_[i], static_cast<int>(i));
  }
}

int TagScheme::Id(const std::string& tag) const {
  auto it = ids_.find(tag);
  return it == ids_.end() ? -1 : it->second;
}

bool TagScheme::Allowed(int prev, int next) const {
  if (!IsInside(next)) return true;
  if (prev < 0 || prev >= size()) return false;
  return TypeOf(prev) == TypeOf(next);
}

std::uint64_t TagScheme::Hash() const { return Fnv1a(tags_); }

Vocabulary::Vocabulary(std::vector<std::string> reserved, int unk_id)
    : reserved_(reserved.size()), unk_id_(unk_id) {
  for (const std::string& r : reserved) Add(r);
}

Vocabulary Vocabulary::Words() { return Vocabulary({"<unk>"}, 0); }
Vocabulary Vocabulary::Chars() { return Vocabulary({"<pad>", "<unk>"}, kUnkChar); }

int Vocabulary::Add(const std::string& s) {
  auto [it, inserted] = ids_.emplace(s, static_cast<int>(entries_.size()));
  if (inserted) entries_.push_back(s);
  return it->second;
}

int Vocabulary::Id(const std::string& s) const {
  auto it = ids_.find(s);
  return it == ids_.end() ? unk_id_ : it->second;
}

std::uint64_t Vocabulary::Hash() const { return Fnv1a(entries_); }

std::size_t Corpus::NumSentences() const {
  std::size_t n = 0;
  for (const Document& d : documents) n += d.sentences.size();
  return n;
}

std::size_t Corpus::NumTokens() const {
  std::size_t n = 0;
  for (const Document& d : documents) {
    for (const Sentence& s : d.sentences) n += s.tokens.size();
  }
  return n;
}

TagTable GoldTags(const Corpus& corpus) {
  TagTable table(corpus.documents.size());
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
    for (const Sentence& s : corpus.documents[d].sentences) {
      std::vector<int>& row = table[d].emplace_back();
      for (const Token& t : s.tokens) row.push_back(t.gold_tag);
    }
  }
  return table;
}

std::vector<std::string> SplitChars(const std::string& s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    if (c >= 0xF0 && c <= 0xF7) {
      len = 4;
    } else if (c >= 0xE0) {
      len = 3;
    } else if (c >= 0xC0) {
      len = 2;
    }
    if (c >= 0xF8 || i + len > s.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(s[i + k]) & 0xC0) != 0x80) {
        len = 1;
        break;
      }
    }
    out.push_back(s.substr(i, len));
    i += len;
  }
  return out;
}

std::string Lowercase(const std::string& s) {
  std::string out = s;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto c = static_cast<unsigned char>(out[i]);
    if (c >= 'A' && c <= 'Z') {
      out[i] = static_cast<char>(c + 32);
    } else if (c == 0xC3 && i + 1 < out.size()) {
      // U+00C0..U+00DE except U+00D7 (multiplication sign).
      const auto n = static_cast<unsigned char>(out[i + 1]);
      if (n >= 0x80 && n <= 0x9E && n != 0x97) out[i + 1] = static_cast<char>(n + 0x20);
      ++i;
    }
  }
  return out;
}

std::size_t RepairBio(std::span<int> tags, const TagScheme& scheme) {
  std::size_t repaired = 0;
  int prev = scheme.start_id();
  for (int& tag : tags) {
    if (scheme.IsInside(tag) && !scheme.Allowed(prev, tag)) {
      tag = scheme.BeginOf(scheme.TypeOf(tag));
      ++repaired;
    }
    prev = tag;
  }
  return repaired;
}

std::vector<Entity> ExtractEntities(std::span<const int> tags,
                                    const TagScheme& scheme) {
  std::vector<Entity> out;
  bool open = false;
  Entity cur;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    const int tag = tags[i];
    const int type = scheme.TypeOf(tag);
    const bool continues = open && scheme.IsInside(tag) && type == cur.type;
    if (continues) continue;
    if (open) {
      cur.end = i;
      out.push_back(cur);
      open = false;
    }
    if (type >= 0) {
      cur = Entity{i, i, type};
      open = true;
    }
  }
  if (open) {
    cur.end = tags.size();
    out.push_back(cur);
  }
  return out;
}

Corpus ParseConll(std::istream& in, const std::string& name,
                  std::size_t column_word, std::size_t column_tag,
                  const TagScheme& scheme) {
  Corpus corpus;
  corpus.tag_set = scheme;
  const bool tagged = column_tag != kNoTagColumn;
  const std::size_t min_columns = (tagged ? std::max(column_word, column_tag) : column_word) + 1;

  Document doc;
  Sentence sent;
  auto flush_sentence = [&] {
    if (sent.tokens.empty()) return;
    std::vector<int> tags;
    for (const Token& t : sent.tokens) tags.push_back(t.gold_tag);
    corpus.repaired_tags += RepairBio(tags, scheme);
    for (std::size_t i = 0; i < tags.size(); ++i) sent.tokens[i].gold_tag = tags[i];
    sent.doc_index = corpus.documents.size();
    sent.sent_index = doc.sentences.size();
    doc.sentences.push_back(std::move(sent));
    sent = Sentence();
  };
  auto flush_document = [&] {
    flush_sentence();
    if (doc.sentences.empty()) return;
    doc.doc_id = "doc" + std::to_string(corpus.documents.size());
    corpus.documents.push_back(std::move(doc));
    doc = Document();
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> fields = SplitWhitespace(line);
    if (fields.empty()) {
      flush_sentence();
      continue;
    }
    if (fields[0] == kDocStart) {
      flush_document();
      continue;
    }
    if (fields.size() < min_columns) {
      throw LoadError(name, line_no,
                      "expected at least " + std::to_string(min_columns) +
                          " columns, found " + std::to_string(fields.size()));
    }
    Token tok;
    tok.surface = fields[column_word];
    tok.gold_tag = tagged ? scheme.Id(fields[column_tag]) : TagScheme::kOutside;
    if (tok.gold_tag < 0) {
      throw LoadError(name, line_no, "unknown tag '" + fields[column_tag] + "'");
    }
    sent.tokens.push_back(std::move(tok));
  }
  flush_document();

  for (const Document& d : corpus.documents) {
    for (const Sentence& s : d.sentences) {
      for (const Token& t : s.tokens) {
        corpus.word_vocab.Add(t.surface);
        for (const std::string& c : SplitChars(t.surface)) corpus.char_vocab.Add(c);
      }
    }
  }
  for (Document& d : corpus.documents) {
    for (Sentence& s : d.sentences) {
      for (Token& t : s.tokens) ResolveIds(t, corpus.word_vocab, corpus.char_vocab);
    }
  }
  return corpus;
}

Corpus LoadConll(const std::string& path, std::size_t column_word,
                 std::size_t column_tag, const TagScheme& scheme) {
  std::ifstream in(path);
  if (!in) throw LoadError(path, 0, "cannot open file");
  return ParseConll(in, path, column_word, column_tag, scheme);
}

void WriteConll(std::ostream& out, const Corpus& corpus) {
  for (const Document& d : corpus.documents) {
    out << kDocStart << " O\n\n";
    for (const Sentence& s : d.sentences) {
      for (const Token& t : s.tokens) {
        out << t.surface << ' ' << corpus.tag_set.Name(t.gold_tag) << '\n';
      }
      out << '\n';
    }
  }
}

void IndexCorpus(Corpus& corpus, const Vocabulary& words, const Vocabulary& chars) {
  corpus.word_vocab = words;
  corpus.char_vocab = chars;
  for (Document& d : corpus.documents) {
    for (Sentence& s : d.sentences) {
      for (Token& t : s.tokens) ResolveIds(t, words, chars);
    }
  }
}

Corpus SplitIntoDocuments(const Corpus& corpus, std::size_t sentences_per_doc,
                          std::uint64_t seed) {
  if (sentences_per_doc == 0) {
    throw ArgumentError("split_into_documents: sentences_per_doc must be positive");
  }
  std::vector<const Sentence*> all;
  for (const Document& d : corpus.documents) {
    for (const Sentence& s : d.sentences) all.push_back(&s);
  }
  if (all.empty()) throw ArgumentError("split_into_documents: empty corpus");
  Rng rng(seed);
  rng.Shuffle(all);

  Corpus out;
  out.tag_set = corpus.tag_set;
  out.word_vocab = corpus.word_vocab;
  out.char_vocab = corpus.char_vocab;
  out.repaired_tags = corpus.repaired_tags;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (i % sentences_per_doc == 0) {
      Document& d = out.documents.emplace_back();
      d.doc_id = "doc" + std::to_string(out.documents.size() - 1);
    }
    Document& d = out.documents.back();
    Sentence s = *all[i];
    s.doc_index = out.documents.size() - 1;
    s.sent_index = d.sentences.size();
    d.sentences.push_back(std::move(s));
  }
  return out;
}

EmbeddingFile ReadEmbeddingFile(const std::string& path, std::size_t dim) {
  std::ifstream in(path);
  if (!in) throw LoadError(path, 0, "cannot open file");
  EmbeddingFile file;
  file.dim = dim;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::vector<std::string> fields = SplitWhitespace(line);
    if (fields.empty()) continue;
    if (line_no == 1 && fields.size() == 2) {
      auto is_int = [](const std::string& s) {
        return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
      };
      if (is_int(fields[0]) && is_int(fields[1])) continue;
    }
    if (fields.size() - 1 != dim) {
      throw LoadError(path, line_no,
                      "vector length " + std::to_string(fields.size() - 1) +
                          " != " + std::to_string(dim));
    }
    std::vector<double> v(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      const std::string& f = fields[k + 1];
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v[k]);
      if (ec != std::errc() || ptr != f.data() + f.size()) {
        throw LoadError(path, line_no, "bad number '" + f + "'");
      }
    }
    file.vectors.emplace(fields[0], std::move(v));
  }
  return file;
}

EmbeddingTable RandomEmbeddings(std::size_t dim, const Vocabulary& vocab, Rng& rng) {
  EmbeddingTable out;
  const double bound = std::sqrt(3.0 / static_cast<double>(dim));
  out.table.resize(vocab.size(), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < out.table.size(); ++i) {
    out.table.data()[i] = rng.Uniform(-bound, bound);
  }
  return out;
}

EmbeddingTable LoadEmbeddings(const EmbeddingFile& file, const Vocabulary& vocab,
                              Rng& rng) {
  EmbeddingTable out = RandomEmbeddings(file.dim, vocab, rng);
  for (int id = static_cast<int>(vocab.reserved()); id < vocab.size(); ++id) {
    const std::string& word = vocab.Entry(id);
    auto it = file.vectors.find(word);
    if (it != file.vectors.end()) {
      ++out.exact_matches;
    } else {
      it = file.vectors.find(Lowercase(word));
      if (it == file.vectors.end()) continue;
      ++out.lowercase_matches;
    }
    for (std::size_t k = 0; k < file.dim; ++k) {
      out.table(id, static_cast<Eigen::Index>(k)) = it->second[k];
    }
  }
  const std::size_t words = static_cast<std::size_t>(vocab.size()) - vocab.reserved();
  out.coverage = words == 0 ? 0.0
                            : static_cast<double>(out.exact_matches + out.lowercase_matches) /
                                  static_cast<double>(words);
  return out;
}

EmbeddingTable LoadEmbeddings(const std::string& path, std::size_t dim,
                              const Vocabulary& vocab, Rng& rng) {
  return LoadEmbeddings(ReadEmbeddingFile(path, dim), vocab, rng);
}

Vocabulary BuildWordVocabulary(const Corpus& train,
                               std::span<const Corpus* const> others,
                               const EmbeddingFile* embeddings) {
  Vocabulary vocab = Vocabulary::Words();
  for (const Document& d : train.documents) {
    for (const Sentence& s : d.sentences) {
      for (const Token& t : s.tokens) vocab.Add(t.surface);
    }
  }
  if (embeddings == nullptr) return vocab;
  for (const Corpus* c : others) {
    for (const Document& d : c->documents) {
      for (const Sentence& s : d.sentences) {
        for (const Token& t : s.tokens) {
          if (embeddings->vectors.count(t.surface) > 0 ||
              embeddings->vectors.count(Lowercase(t.surface)) > 0) {
            vocab.Add(t.surface);
          }
        }
      }
    }
  }
  return vocab;
}

Vocabulary BuildCharVocabulary(const Corpus& train) {
  Vocabulary chars = Vocabulary::Chars();
  for (const Document& d : train.documents) {
    for (const Sentence& s : d.sentences) {
      for (const Token& t : s.tokens) {
        for (const std::string& c : SplitChars(t.surface)) chars.Add(c);
      }
    }
  }
  return chars;
}

}  // namespace gner
