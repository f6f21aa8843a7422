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

#ifndef GNER_TESTS_FIXTURES_H_
#define GNER_TESTS_FIXTURES_H_

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "gner/corpus.h"
#include "gner/encoder.h"
#include "gner/tagger.h"

namespace gner::testing {

inline Corpus FromConll(const std::string& text) {
  std::istringstream in(text);
  return ParseConll(in, "inline", 0, 1);
}

// "EU B-ORG|rejects O" style: tokens separated by '|', sentences by ';',
// documents by '#'.
inline Corpus FromCompact(const std::string& spec) {
  std::string text;
  std::string token;
  for (char c : spec + '|') {
    if (c == '|' || c == ';' || c == '#') {
      if (!token.empty()) text += token + "\n";
      token.clear();
      if (c == ';') text += "\n";
      if (c == '#') text += "\n-DOCSTART- O\n\n";
    } else {
      token += c;
    }
  }
  return FromConll(text);
}

inline EncoderConfig TinyEncoder() {
  EncoderConfig c;
  c.word_dim = 3;
  c.char_dim = 2;
  c.char_filters = 2;
  c.char_widths = {1, 2};
  c.lstm_hidden = 2;
  c.dropout = 0.5;
  return c;
}

inline ModelConfig TinyModel() {
  ModelConfig m;
  m.encoder = TinyEncoder();
  m.attention_dim = 3;
  m.upper_hidden = 2;
  return m;
}

// A fresh path under the system temp directory, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("gner_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  std::string File(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline void WriteText(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string ReadText(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace gner::testing

#endif  // GNER_TESTS_FIXTURES_H_
