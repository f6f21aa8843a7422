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

// Binary model container. All integers are little-endian.
//
//   "GNERCKPT" u32 version
//   u64 length + JSON header (model and retrieval config, mode, attached
//       levels, entity types, vocabulary hashes)
//   word vocabulary, char vocabulary: u64 count, then u64 length + bytes each
//   u64 tensor count, per tensor: name, u32 ndim, u64 dims, float64 payload
//   u8 has_topics [, topic model]
//
// The layout has no timestamps, so equal models give equal bytes.

#ifndef GNER_CHECKPOINT_H_
#define GNER_CHECKPOINT_H_

#include <memory>
#include <optional>
#include <string>

#include "json.hpp"

#include "gner/corpus.h"
#include "gner/lda.h"
#include "gner/retrieval.h"
#include "gner/tagger.h"

namespace gner {

inline constexpr std::uint32_t kCheckpointVersion = 1;

nlohmann::json ModelConfigToJson(const ModelConfig& config);
ModelConfig ModelConfigFromJson(const nlohmann::json& j);
nlohmann::json RetrievalConfigToJson(const RetrievalConfig& config);
RetrievalConfig RetrievalConfigFromJson(const nlohmann::json& j);

struct ModelBundle {
  std::unique_ptr<Tagger> tagger;
  Mode mode = Mode::kBaseline;
  RetrievalConfig retrieval;
  Vocabulary words;
  Vocabulary chars;
  // Topic model of the training split, when one was fitted.
  std::optional<TopicModel> topics;
};

std::string SerializeCheckpoint(Tagger& tagger, Mode mode, const RetrievalConfig& retrieval,
                                const Vocabulary& words, const Vocabulary& chars,
                                const TopicModel* topics);

// Throws LoadError on a bad magic, version, truncation, a vocabulary whose
// hash differs from the recorded one, or a missing or misshapen tensor.
ModelBundle ParseCheckpoint(const std::string& bytes);

void WriteFileBytes(const std::string& path, const std::string& bytes);
std::string ReadFileBytes(const std::string& path);

}  // namespace gner

#endif  // GNER_CHECKPOINT_H_
