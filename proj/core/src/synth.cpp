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

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>

#include "htm/corpus.hpp"

namespace htm {

namespace {

// Number of ordered selections of k distinct items out of n, saturating.
double permutations(int n, int k) {
  double p = 1.0;
  for (int i = 0; i < k; ++i) p *= static_cast<double>(n - i);
  return p;
}

double f32(double v) { return static_cast<double>(static_cast<float>(v)); }

std::string zero_pad(int v, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*d", width, v);
  return buf;
}

}  // namespace

void SynthConfig::validate() const {
  if (n_tasks < 1 || n_actions < 1 || feature_dim < 1 || videos_per_task < 1 ||
      grammars_per_task < 1 || test_videos_per_task < 0) {
    throw ConfigError("synthetic counts must be >= 1");
  }
  if (min_grammar_length < 1 || max_grammar_length < min_grammar_length) {
    throw ConfigError("invalid grammar length range");
  }
  if (noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
  if (min_duration < 1) throw ConfigError("min_duration must be >= 1");
  if (duration_mean < min_duration) throw ConfigError("duration_mean must be >= min_duration");
  if (background_prob < 0.0 || background_prob > 1.0) {
    throw ConfigError("background_prob must be in [0,1]");
  }
  if (task_pool_size < 0) throw ConfigError("task_pool_size must be >= 0");
}

SynthCorpus generate_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  std::vector<std::string> task_names, action_names;
  for (int t = 0; t < cfg.n_tasks; ++t) task_names.push_back("task" + zero_pad(t, 2));
  for (int a = 1; a <= cfg.n_actions; ++a) action_names.push_back("act" + zero_pad(a, 2));
  Vocabularies vocab = Vocabularies::identity(task_names, action_names);

  SynthCorpus out;
  out.action_means.resize(cfg.feature_dim, cfg.n_actions + 1);
  for (Index a = 0; a < out.action_means.cols(); ++a) {
    for (Index f = 0; f < out.action_means.rows(); ++f) out.action_means(f, a) = f32(normal(rng));
  }

  // Each task draws from a window of consecutive actions (wrapping around), so neighbouring
  // tasks share some actions while most of a task's actions are characteristic of it.
  const int pool_size = cfg.task_pool_size == 0 ? cfg.n_actions : std::min(cfg.task_pool_size, cfg.n_actions);
  std::vector<std::vector<int>> pools(cfg.n_tasks);
  for (int t = 0; t < cfg.n_tasks; ++t) {
    const int start = t * cfg.n_actions / cfg.n_tasks;
    for (int i = 0; i < pool_size; ++i) pools[t].push_back(1 + (start + i) % cfg.n_actions);
  }

  double capacity = 0.0;
  const int longest = std::min(cfg.max_grammar_length, pool_size);
  for (int s = std::min(cfg.min_grammar_length, longest); s <= longest; ++s) {
    capacity += permutations(pool_size, s);
  }
  if (capacity < cfg.grammars_per_task) {
    throw ConfigError("infeasible synthetic config: not enough distinct grammars per task");
  }

  std::set<ActionSeq> used;
  for (int t = 0; t < cfg.n_tasks; ++t) {
    auto pool = pools[t];
    std::uniform_int_distribution<int> len_dist(std::min(cfg.min_grammar_length, longest), longest);
    int made = 0;
    long attempts = 0;
    while (made < cfg.grammars_per_task) {
      if (++attempts > 100000L * cfg.grammars_per_task) {
        throw ConfigError("infeasible synthetic config: grammar sampling did not converge");
      }
      std::shuffle(pool.begin(), pool.end(), rng);
      ActionSeq g(pool.begin(), pool.begin() + len_dist(rng));
      if (!used.insert(g).second) continue;
      out.grammars.push_back(std::move(g));
      ++made;
    }
  }

  std::geometric_distribution<int> duration(1.0 / (cfg.duration_mean - cfg.min_duration + 1.0));
  std::bernoulli_distribution background(cfg.background_prob);

  out.train.vocab = vocab;
  out.test.vocab = vocab;
  const int per_task = cfg.videos_per_task + cfg.test_videos_per_task;
  for (int t = 0; t < cfg.n_tasks; ++t) {
    for (int i = 0; i < per_task; ++i) {
      const ActionSeq& g = out.grammars[t * cfg.grammars_per_task + i % cfg.grammars_per_task];
      std::vector<int> labels;
      auto emit = [&](int action) { labels.insert(labels.end(), cfg.min_duration + duration(rng), action); };
      for (std::size_t s = 0; s <= g.size(); ++s) {
        if (background(rng)) emit(kBackground);
        if (s < g.size()) emit(g[s]);
      }

      VideoRecord v;
      v.id = "t" + zero_pad(t, 2) + "_v" + zero_pad(i, 3);
      v.task = t;
      v.transcript = g;
      v.attributes = attributes_of(g, vocab);
      v.features.resize(cfg.feature_dim, static_cast<Index>(labels.size()));
      for (Index f = 0; f < v.features.cols(); ++f) {
        for (Index d = 0; d < v.features.rows(); ++d) {
          const double noise = cfg.noise_sigma > 0.0 ? cfg.noise_sigma * normal(rng) : 0.0;
          v.features(d, f) = f32(out.action_means(d, labels[f]) + noise);
        }
      }
      v.frame_labels = std::move(labels);
      (i < cfg.videos_per_task ? out.train : out.test).videos.push_back(std::move(v));
    }
  }
  return out;
}

}  // namespace htm
