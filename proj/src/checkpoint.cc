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

#include "gner/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "gner/errors.h"

namespace gner {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'G', 'N', 'E', 'R', 'C', 'K', 'P', 'T'};
const char* const kSource = "checkpoint";

class Writer {
 public:
  template <typename T>
  void Pod(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out_.append(buf, sizeof(T));
  }
  void String(const std::string& s) {
    Pod<std::uint64_t>(s.size());
    out_ += s;
  }
  void Raw(const char* data, std::size_t n) { out_.append(data, n); }
  void Tensor(const Matrix& m) {
    Pod<std::uint32_t>(2);
    Pod<std::uint64_t>(static_cast<std::uint64_t>(m.rows()));
    Pod<std::uint64_t>(static_cast<std::uint64_t>(m.cols()));
    Raw(reinterpret_cast<const char*>(m.data()),
        static_cast<std::size_t>(m.size()) * sizeof(double));
  }
  void Strings(const std::vector<std::string>& v) {
    Pod<std::uint64_t>(v.size());
    for (const std::string& s : v) String(s);
  }
  std::string& bytes() { return out_; }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}

  template <typename T>
  T Pod() {
    Need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string String() {
    const auto n = Pod<std::uint64_t>();
    Need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  Matrix Tensor() {
    const auto ndim = Pod<std::uint32_t>();
    if (ndim != 2) throw LoadError(kSource, 0, "tensor rank " + std::to_string(ndim));
    const auto rows = Pod<std::uint64_t>();
    const auto cols = Pod<std::uint64_t>();
    if (cols != 0 && rows > (bytes_.size() - pos_) / sizeof(double) / cols) {
      throw LoadError(kSource, 0, "truncated tensor payload");
    }
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    const std::size_t n = static_cast<std::size_t>(m.size()) * sizeof(double);
    Need(n);
    std::memcpy(m.data(), bytes_.data() + pos_, n);
    pos_ += n;
    return m;
  }
  std::vector<std::string> Strings() {
    const auto n = Pod<std::uint64_t>();
    std::vector<std::string> out;
    for (std::uint64_t i = 0; i < n; ++i) out.push_back(String());
    return out;
  }
  void Expect(const char* data, std::size_t n, const char* what) {
    Need(n);
    if (std::memcmp(bytes_.data() + pos_, data, n) != 0) {
      throw LoadError(kSource, 0, std::string("bad ") + what);
    }
    pos_ += n;
  }
  bool done() const { return pos_ == bytes_.size(); }

 private:
  void Need(std::size_t n) const {
    if (n > bytes_.size() - pos_) throw LoadError(kSource, 0, "truncated file");
  }

  const std::string& bytes_;
  std::size_t pos_ = 0;
};

Vocabulary RebuildVocabulary(const std::vector<std::string>& entries, std::size_t reserved,
                             int unk_id, std::uint64_t expected_hash, const char* what) {
  if (reserved > entries.size()) throw LoadError(kSource, 0, std::string("bad ") + what);
  Vocabulary v({entries.begin(), entries.begin() + static_cast<std::ptrdiff_t>(reserved)},
               unk_id);
  for (std::size_t i = reserved; i < entries.size(); ++i) v.Add(entries[i]);
  if (v.size() != static_cast<int>(entries.size()) || v.Hash() != expected_hash) {
    throw LoadError(kSource, 0, std::string(what) + " hash mismatch");
  }
  return v;
}

}  // namespace

nlohmann::json ModelConfigToJson(const ModelConfig& c) {
  const EncoderConfig& e = c.encoder;
  return {{"word_dim", e.word_dim},
          {"char_dim", e.char_dim},
          {"char_filters", e.char_filters},
          {"char_widths", e.char_widths},
          {"lstm_hidden", e.lstm_hidden},
          {"dropout", e.dropout},
          {"dropout_input", e.dropout_input},
          {"dropout_output", e.dropout_output},
          {"attention_dim", c.attention_dim},
          {"upper_hidden", c.upper_hidden},
          {"bio_mask", c.bio_mask}};
}

ModelConfig ModelConfigFromJson(const nlohmann::json& j) {
  ModelConfig c;
  EncoderConfig& e = c.encoder;
  e.word_dim = j.at("word_dim").get<int>();
  e.char_dim = j.at("char_dim").get<int>();
  e.char_filters = j.at("char_filters").get<int>();
  e.char_widths = j.at("char_widths").get<std::vector<int>>();
  e.lstm_hidden = j.at("lstm_hidden").get<int>();
  e.dropout = j.at("dropout").get<double>();
  e.dropout_input = j.at("dropout_input").get<bool>();
  e.dropout_output = j.at("dropout_output").get<bool>();
  c.attention_dim = j.at("attention_dim").get<int>();
  c.upper_hidden = j.at("upper_hidden").get<int>();
  c.bio_mask = j.at("bio_mask").get<bool>();
  return c;
}

nlohmann::json RetrievalConfigToJson(const RetrievalConfig& c) {
  return {{"doc_cap", c.doc_cap},
          {"corpus_cap", c.corpus_cap},
          {"lda",
           {{"n_topics", c.lda.n_topics},
            {"alpha", c.lda.alpha},
            {"beta", c.lda.beta},
            {"iterations", c.lda.iterations},
            {"seed", c.lda.seed},
            {"stopword_top_k", c.lda.stopword_top_k}}}};
}

RetrievalConfig RetrievalConfigFromJson(const nlohmann::json& j) {
  RetrievalConfig c;
  c.doc_cap = j.at("doc_cap").get<std::size_t>();
  c.corpus_cap = j.at("corpus_cap").get<std::size_t>();
  const nlohmann::json& l = j.at("lda");
  c.lda.n_topics = l.at("n_topics").get<int>();
  c.lda.alpha = l.at("alpha").get<double>();
  c.lda.beta = l.at("beta").get<double>();
  c.lda.iterations = l.at("iterations").get<int>();
  c.lda.seed = l.at("seed").get<std::uint64_t>();
  c.lda.stopword_top_k = l.at("stopword_top_k").get<int>();
  return c;
}

std::string SerializeCheckpoint(Tagger& tagger, Mode mode, const RetrievalConfig& retrieval,
                                const Vocabulary& words, const Vocabulary& chars,
                                const TopicModel* topics) {
  nlohmann::json header;
  header["model"] = ModelConfigToJson(tagger.config());
  header["retrieval"] = RetrievalConfigToJson(retrieval);
  header["mode"] = ModeName(mode);
  header["doc_level"] = tagger.has_document_level();
  header["corpus_level"] = tagger.has_corpus_level();
  header["entity_types"] = tagger.scheme().entity_types();
  header["tag_set_hash"] = tagger.scheme().Hash();
  header["word_vocab"] = {{"hash", words.Hash()},
                          {"reserved", words.reserved()},
                          {"unk_id", words.unk_id()}};
  header["char_vocab"] = {{"hash", chars.Hash()},
                          {"reserved", chars.reserved()},
                          {"unk_id", chars.unk_id()}};

  Writer w;
  w.Raw(kMagic, sizeof(kMagic));
  w.Pod<std::uint32_t>(kCheckpointVersion);
  w.String(header.dump());
  w.Strings(words.entries());
  w.Strings(chars.entries());
  const std::vector<Parameter*> params = tagger.params();
  w.Pod<std::uint64_t>(params.size());
  for (const Parameter* p : params) {
    w.String(p->name);
    w.Tensor(p->value);
  }
  w.Pod<std::uint8_t>(topics != nullptr ? 1 : 0);
  if (topics != nullptr) {
    w.Pod<std::int32_t>(topics->n_topics);
    w.Pod<double>(topics->alpha);
    w.Pod<double>(topics->beta);
    w.Tensor(topics->doc_topic);
    w.Pod<std::uint64_t>(topics->cluster_of_doc.size());
    for (int c : topics->cluster_of_doc) w.Pod<std::int32_t>(c);
    w.Strings(topics->words);
    w.Tensor(topics->topic_word);
  }
  return std::move(w.bytes());
}

ModelBundle ParseCheckpoint(const std::string& bytes) {
  Reader r(bytes);
  r.Expect(kMagic, sizeof(kMagic), "magic");
  const auto version = r.Pod<std::uint32_t>();
  if (version != kCheckpointVersion) {
    throw LoadError(kSource, 0, "unsupported version " + std::to_string(version));
  }
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(r.String());
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(kSource, 0, std::string("bad header: ") + e.what());
  }

  ModelBundle bundle;
  try {
    const ModelConfig config = ModelConfigFromJson(header.at("model"));
    bundle.retrieval = RetrievalConfigFromJson(header.at("retrieval"));
    bundle.mode = ParseMode(header.at("mode").get<std::string>());
    const TagScheme scheme(header.at("entity_types").get<std::vector<std::string>>());
    if (scheme.Hash() != header.at("tag_set_hash").get<std::uint64_t>()) {
      throw LoadError(kSource, 0, "tag set hash mismatch");
    }
    const auto& wv = header.at("word_vocab");
    const auto& cv = header.at("char_vocab");
    bundle.words = RebuildVocabulary(r.Strings(), wv.at("reserved").get<std::size_t>(),
                                     wv.at("unk_id").get<int>(),
                                     wv.at("hash").get<std::uint64_t>(), "word vocabulary");
    bundle.chars = RebuildVocabulary(r.Strings(), cv.at("reserved").get<std::size_t>(),
                                     cv.at("unk_id").get<int>(),
                                     cv.at("hash").get<std::uint64_t>(), "char vocabulary");

    bundle.tagger = std::make_unique<Tagger>(config, scheme, bundle.words.size(),
                                             bundle.chars.size());
    Rng unused(0);
    if (header.at("doc_level").get<bool>()) bundle.tagger->AttachAttention(Mode::kDocument, unused);
    if (header.at("corpus_level").get<bool>()) bundle.tagger->AttachAttention(Mode::kCorpus, unused);
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(kSource, 0, std::string("bad header: ") + e.what());
  }

  std::map<std::string, Parameter*> by_name;
  for (Parameter* p : bundle.tagger->params()) by_name[p->name] = p;
  const auto count = r.Pod<std::uint64_t>();
  if (count != by_name.size()) {
    throw LoadError(kSource, 0, "expected " + std::to_string(by_name.size()) +
                                    " tensors, found " + std::to_string(count));
  }
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::string name = r.String();
    Matrix m = r.Tensor();
    auto it = by_name.find(name);
    if (it == by_name.end()) throw LoadError(kSource, 0, "unknown tensor '" + name + "'");
    Parameter& p = *it->second;
    if (m.rows() != p.value.rows() || m.cols() != p.value.cols()) {
      throw LoadError(kSource, 0, "tensor '" + name + "' is " + ShapeString(m) +
                                      ", expected " + ShapeString(p.value));
    }
    p.value = std::move(m);
    p.ZeroGrad();
    by_name.erase(it);
  }

  if (r.Pod<std::uint8_t>() != 0) {
    TopicModel t;
    t.n_topics = r.Pod<std::int32_t>();
    t.alpha = r.Pod<double>();
    t.beta = r.Pod<double>();
    t.doc_topic = r.Tensor();
    const auto n = r.Pod<std::uint64_t>();
    for (std::uint64_t i = 0; i < n; ++i) t.cluster_of_doc.push_back(r.Pod<std::int32_t>());
    t.words = r.Strings();
    t.topic_word = r.Tensor();
    bundle.topics = std::move(t);
  }
  if (!r.done()) throw LoadError(kSource, 0, "trailing bytes");
  return bundle;
}

void WriteFileBytes(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError(path, 0, "cannot open for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw LoadError(path, 0, "write failed");
}

std::string ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path, 0, "cannot open");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace gner
