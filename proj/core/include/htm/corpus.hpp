// Copyright 2026 The htm Authors.
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "htm/types.hpp"

namespace htm {

struct Vocabularies {
  std::vector<std::string> tasks;
  std::vector<std::string> actions;     // index 0 is always SIL
  std::vector<std::string> attributes;
  std::vector<std::vector<int>> action_to_attrs;  // empty for SIL

  int task_index(const std::string& name) const;
  int action_index(const std::string& name) const;
  int attribute_index(const std::string& name) const;
  int num_tasks() const { return static_cast<int>(tasks.size()); }
  int num_actions() const { return static_cast<int>(actions.size()); }
  int num_attributes() const { return static_cast<int>(attributes.size()); }
  bool identity_attributes() const;

  /// Identity decomposition over `actions` (SIL excluded): attribute j is action j+1.
  static Vocabularies identity(std::vector<std::string> tasks, std::vector<std::string> actions);
  void validate() const;
};

struct VideoRecord {
  std::string id;
  Matrix features;  // F_in x T, column t is frame t
  int task = 0;
  ActionSeq transcript;
  std::set<int> attributes;
  std::optional<std::vector<int>> frame_labels;

  Index num_frames() const { return features.cols(); }
  Index feature_dim() const { return features.rows(); }
};

struct Corpus {
  Vocabularies vocab;
  std::vector<VideoRecord> videos;

  Index feature_dim() const { return videos.empty() ? 0 : videos.front().feature_dim(); }
  int size() const { return static_cast<int>(videos.size()); }
  void validate() const;
};

/// Optional fixed vocabularies for load_corpus. Paths may be empty.
struct CorpusFiles {
  std::filesystem::path tasks;       // one task name per line
  std::filesystem::path actions;     // one action name per line; SIL prepended if absent
  std::filesystem::path attributes;  // "action attr attr ..." per line; identity if empty
};

Corpus load_corpus(const std::filesystem::path& manifest, const CorpusFiles& files = {});
/// Loads against a fixed vocabulary (e.g. a trained model's); unknown names are errors.
Corpus load_corpus(const std::filesystem::path& manifest, const Vocabularies& vocab);

/// Writes features/, transcripts/, labels/, <name>.manifest and vocabulary files under dir.
void save_corpus(const Corpus& corpus, const std::filesystem::path& dir, const std::string& name);
void save_vocabularies(const Vocabularies& vocab, const std::filesystem::path& dir);
CorpusFiles vocabulary_files(const std::filesystem::path& dir);

/// "WTE1" feature matrix files.
Matrix read_feature_file(const std::filesystem::path& path);
void write_feature_file(const std::filesystem::path& path, const Matrix& m);

const std::vector<int>& decompose_attributes(int action, const Vocabularies& vocab);
std::set<int> attributes_of(const ActionSeq& transcript, const Vocabularies& vocab);

/// Runs of labels with background removed and consecutive duplicates merged.
ActionSeq non_background_runs(const std::vector<int>& frame_labels);

struct SynthConfig {
  int n_tasks = 5;
  int n_actions = 12;  // excluding SIL
  int feature_dim = 32;
  int videos_per_task = 8;
  int test_videos_per_task = 4;
  int grammars_per_task = 2;
  int min_grammar_length = 3;
  int max_grammar_length = 5;
  double duration_mean = 10.0;
  int min_duration = 4;  // lengths are min_duration + geometric, with mean duration_mean
  double noise_sigma = 1.0;
  double background_prob = 0.3;
  int task_pool_size = 5;  // actions each task draws from (cyclic windows); 0 = all actions
  std::uint64_t seed = 7;

  void validate() const;
};

struct SynthCorpus {
  Corpus train;
  Corpus test;
  std::vector<ActionSeq> grammars;   // grammar g belongs to task g / grammars_per_task
  Matrix action_means;               // feature_dim x (n_actions + 1)
};

SynthCorpus generate_synthetic(const SynthConfig& cfg);

}  // namespace htm
