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

#include "support/synthetic.h"

#include <algorithm>
#include <array>
#include <sstream>
#include <vector>

#include "gner/errors.h"

namespace gner::testing {
namespace {

constexpr std::array<const char*, 12> kNames = {
    "Zywiec", "Kalmar", "Tovena", "Brisko", "Merlan", "Dunvar",
    "Ostrel", "Pavlin", "Quoran", "Selvik", "Varnok", "Ylbera"};

constexpr std::array<const char*, 3> kTypes = {"PER", "ORG", "LOC"};

constexpr std::array<std::array<int, 3>, 6> kPermutations = {{
    {0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {0, 2, 1}, {2, 1, 0}, {1, 0, 2}}};

constexpr std::array<const char*, 6> kTopicStems = {"match", "market", "harvest",
                                                    "voyage", "trial", "concert"};

struct Line {
  std::vector<std::pair<std::string, std::string>> tokens;  // surface, tag
};

// "_" marks the name position.
Line Template(const std::vector<std::string>& words, const std::string& name,
              const std::string& type) {
  Line line;
  for (const std::string& w : words) {
    if (w == "_") {
      line.tokens.emplace_back(name, "B-" + type);
    } else {
      line.tokens.emplace_back(w, "O");
    }
  }
  return line;
}

Line ContextSentence(const std::string& name, const std::string& type, Rng& rng) {
  static const std::vector<std::string> kPer[] = {
      {"mr", "_", "said", "on", "monday", "."}, {"_", "told", "reporters", "he", "agreed", "."}};
  static const std::vector<std::string> kOrg[] = {
      {"_", "shares", "rose", "in", "trading", "."}, {"the", "company", "_", "posted", "profits", "."}};
  static const std::vector<std::string> kLoc[] = {
      {"in", "_", "city", "crowds", "gathered", "."}, {"they", "travelled", "to", "_", "province", "."}};
  const std::size_t pick = rng.Index(2);
  if (type == "PER") return Template(kPer[pick], name, type);
  if (type == "ORG") return Template(kOrg[pick], name, type);
  return Template(kLoc[pick], name, type);
}

Line AmbiguousSentence(const std::string& name, const std::string& type, Rng& rng) {
  static const std::vector<std::string> kAmbiguous[] = {
      {"_", "was", "mentioned", "again", "."},
      {"reports", "about", "_", "appeared", "."}};
  return Template(kAmbiguous[rng.Index(2)], name, type);
}

Line FillerSentence(int topic, int topic_words, Rng& rng) {
  Line line;
  const std::size_t len = 5 + rng.Index(3);
  for (std::size_t i = 0; i < len; ++i) {
    line.tokens.emplace_back(
        std::string(kTopicStems[static_cast<std::size_t>(topic)]) +
            std::to_string(rng.Index(static_cast<std::size_t>(topic_words))),
        "O");
  }
  line.tokens.emplace_back(".", "O");
  return line;
}

}  // namespace

SentenceFilter SyntheticCorpus::AmbiguousFilter() const {
  return [set = ambiguous](std::size_t doc, std::size_t sent) {
    return set.count({doc, sent}) > 0;
  };
}

std::string SyntheticType(int name, int topic) {
  const auto& perm = kPermutations[static_cast<std::size_t>(name) % kPermutations.size()];
  return kTypes[static_cast<std::size_t>(perm[static_cast<std::size_t>(topic) % 3])];
}

SyntheticCorpus GenerateSynthetic(const SyntheticOptions& options) {
  if (options.names <= 0 || options.names > static_cast<int>(kNames.size()) ||
      options.topics <= 0 || options.topics > static_cast<int>(kTopicStems.size()) ||
      options.names_per_document > options.names || options.documents <= 0) {
    throw ArgumentError("synthetic: invalid options");
  }
  Rng rng(options.seed);
  std::ostringstream text;
  std::vector<std::vector<bool>> ambiguous_flags;
  for (int d = 0; d < options.documents; ++d) {
    const int topic = d % options.topics;
    std::vector<std::size_t> names(static_cast<std::size_t>(options.names));
    for (std::size_t i = 0; i < names.size(); ++i) names[i] = i;
    rng.Shuffle(names);
    names.resize(static_cast<std::size_t>(options.names_per_document));

    std::vector<std::pair<Line, bool>> lines;
    for (std::size_t n : names) {
      const std::string name = kNames[n];
      const std::string type = SyntheticType(static_cast<int>(n), topic);
      lines.emplace_back(AmbiguousSentence(name, type, rng), true);
      int context = 0;
      if (rng.Uniform() >= options.no_context_probability) {
        context = 1 + static_cast<int>(rng.Index(
                          static_cast<std::size_t>(options.max_context_sentences)));
      }
      for (int c = 0; c < context; ++c) lines.emplace_back(ContextSentence(name, type, rng), false);
    }
    for (int f = 0; f < options.filler_sentences; ++f) {
      lines.emplace_back(FillerSentence(topic, options.topic_words, rng), false);
    }
    rng.Shuffle(lines);

    text << "-DOCSTART- O\n\n";
    std::vector<bool>& flags = ambiguous_flags.emplace_back();
    for (const auto& [line, is_ambiguous] : lines) {
      for (const auto& [surface, tag] : line.tokens) text << surface << ' ' << tag << '\n';
      text << '\n';
      flags.push_back(is_ambiguous);
    }
  }

  SyntheticCorpus out;
  std::istringstream in(text.str());
  out.corpus = ParseConll(in, "synthetic", 0, 1);
  for (std::size_t d = 0; d < ambiguous_flags.size(); ++d) {
    for (std::size_t s = 0; s < ambiguous_flags[d].size(); ++s) {
      if (ambiguous_flags[d][s]) out.ambiguous.insert({d, s});
    }
  }
  return out;
}

Corpus TenSentenceCorpus() {
  std::istringstream in(
      "-DOCSTART- O\n\n"
      "Peter B-PER\nBlackburn I-PER\nsaid O\n. O\n\n"
      "EU B-ORG\nrejects O\nGerman B-MISC\ncall O\n\n"
      "Blackburn B-PER\nvisited O\nGranada B-LOC\n\n"
      "the O\nEuropean B-ORG\nCommission I-ORG\nagreed O\n\n"
      "Zywiec B-ORG\nshares O\nrose O\n\n"
      "-DOCSTART- O\n\n"
      "in O\nMadrid B-LOC\nthey O\nmet O\n\n"
      "Dutch B-MISC\nfarmers O\nprotested O\n\n"
      "Maria B-PER\nthanked O\nthe O\nCommission B-ORG\n\n"
      "rain O\nfell O\nin O\nBrussels B-LOC\n\n"
      "Italian B-MISC\nwine O\nsold O\nwell O\n");
  return ParseConll(in, "ten", 0, 1);
}

}  // namespace gner::testing
