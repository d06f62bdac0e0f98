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

#include "htm/segment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

#include "htm/fusion.hpp"
#include "htm/nn.hpp"

namespace htm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Unit {
  int action;
  bool optional;
};

std::vector<Unit> expand(const ActionSeq& grammar, bool background) {
  std::vector<Unit> units;
  for (int a : grammar) {
    if (background) units.push_back({kBackground, true});
    units.push_back({a, false});
  }
  if (background) units.push_back({kBackground, true});
  return units;
}

}  // namespace

std::vector<int> GrammarStore::all_indices() const {
  std::vector<int> idx(all.size());
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

void GrammarStore::validate() const {
  if (grammar_task.size() != all.size()) throw DataError("grammar_task size mismatch");
  std::vector<bool> covered(all.size(), false);
  for (const auto& owned : by_task) {
    for (int g : owned) {
      if (g < 0 || g >= size()) throw DataError("grammar index out of range");
      covered[g] = true;
    }
  }
  for (int g = 0; g < size(); ++g) {
    if (all[g].empty()) throw DataError("empty grammar");
    if (!covered[g]) throw DataError("grammar owned by no task");
    const auto& owners = by_task.at(grammar_task[g]);
    if (std::find(owners.begin(), owners.end(), g) == owners.end()) {
      throw DataError("grammar_task inconsistent with by_task");
    }
  }
}

GrammarStore build_grammar_store(const Corpus& corpus) {
  if (corpus.videos.empty()) throw DataError("cannot build grammars from an empty corpus");
  GrammarStore store;
  std::map<ActionSeq, int> index;
  std::vector<std::map<int, int>> task_counts;
  store.by_task.assign(corpus.vocab.num_tasks(), {});
  for (const auto& v : corpus.videos) {
    auto [it, inserted] = index.emplace(v.transcript, store.size());
    if (inserted) {
      store.all.push_back(v.transcript);
      task_counts.emplace_back();
    }
    const int g = it->second;
    if (task_counts[g][v.task]++ == 0) store.by_task[v.task].push_back(g);
  }
  for (auto& owned : store.by_task) std::sort(owned.begin(), owned.end());
  for (const auto& counts : task_counts) {
    int best = -1, best_count = 0;
    for (const auto& [task, count] : counts) {  // ascending task order; ties keep the lower
      if (count > best_count) {
        best = task;
        best_count = count;
      }
    }
    store.grammar_task.push_back(best);
  }
  return store;
}

double poisson_log_pmf(double lambda, int length) {
  return length * std::log(lambda) - lambda - std::lgamma(length + 1.0);
}

double DurationModel::log_pmf(int action, int length) const {
  return poisson_log_pmf(lambda[action], length);
}

DurationModel fit_durations(const Corpus& corpus, double background_share, double d_max_factor) {
  if (corpus.videos.empty()) throw DataError("cannot fit durations on an empty corpus");
  const int actions = corpus.vocab.num_actions();
  Vector sum = Vector::Zero(actions), count = Vector::Zero(actions);
  for (const auto& v : corpus.videos) {
    const double frames = static_cast<double>(v.num_frames());
    const double slots = static_cast<double>(v.transcript.size());
    for (int a : v.transcript) {
      sum[a] += (1.0 - background_share) * frames / slots;
      count[a] += 1.0;
    }
    if (background_share > 0.0) {
      sum[kBackground] += background_share * frames;
      count[kBackground] += slots + 1.0;
    }
  }
  const double global = sum.tail(actions - 1).sum() / std::max(1.0, count.tail(actions - 1).sum());
  DurationModel d;
  d.lambda.resize(actions);
  for (int a = 0; a < actions; ++a) d.lambda[a] = count[a] > 0 ? sum[a] / count[a] : global;
  d.d_max = std::max(1, static_cast<int>(std::ceil(d_max_factor * d.lambda.maxCoeff())));
  return d;
}

std::vector<int> uniform_alignment(Index frames, const ActionSeq& transcript, bool background,
                                   double background_share) {
  std::vector<int> units;
  std::vector<double> lengths;
  const double total = static_cast<double>(frames);
  const double slots = static_cast<double>(transcript.size());
  const bool bg = background && background_share > 0.0;
  const double action_len = (bg ? 1.0 - background_share : 1.0) * total / slots;
  const double bg_len = bg ? background_share * total / (slots + 1.0) : 0.0;
  for (int a : transcript) {
    if (bg) {
      units.push_back(kBackground);
      lengths.push_back(bg_len);
    }
    units.push_back(a);
    lengths.push_back(action_len);
  }
  if (bg) {
    units.push_back(kBackground);
    lengths.push_back(bg_len);
  }
  std::vector<int> labels(static_cast<std::size_t>(frames));
  std::size_t u = 0;
  double end = lengths[0];
  for (Index t = 0; t < frames; ++t) {
    while (static_cast<double>(t) + 0.5 >= end && u + 1 < units.size()) end += lengths[++u];
    labels[static_cast<std::size_t>(t)] = units[u];
  }
  return labels;
}

Vector uniform_alignment_log_prior(const Corpus& corpus, bool background, double background_share) {
  Vector counts = Vector::Zero(corpus.vocab.num_actions());
  for (const auto& v : corpus.videos) {
    for (int a : uniform_alignment(v.num_frames(), v.transcript, background, background_share)) {
      counts[a] += 1.0;
    }
  }
  const Vector freq = counts / counts.sum();
  return freq.unaryExpr([](double p) { return std::log(std::max(p, 1e-8)); });
}

FrameScores frame_scores(const ModelParams& model, const Matrix& features) {
  if (!model.has_action_head() || model.stats.log_prior.size() == 0) {
    throw DataError("untrained model: no frame classifier in checkpoint");
  }
  const Matrix phi = encode_forward(features, model.weights.encoder).phi;
  Matrix logits = model.action_head.weight * phi;
  logits.colwise() += model.action_head.bias;
  FrameScores s;
  s.log_post.resize(logits.rows(), logits.cols());
  for (Index t = 0; t < logits.cols(); ++t) s.log_post.col(t) = log_softmax(logits.col(t));
  s.log_prior = model.stats.log_prior;
  return s;
}

Alignment align_grammar(const FrameScores& scores, const ActionSeq& grammar,
                        const DurationModel& durations, const DecodeOptions& opts) {
  const Index frames = scores.num_frames();
  if (grammar.empty()) throw DataError("empty grammar");
  if (static_cast<Index>(grammar.size()) > frames) throw DataError("grammar longer than video");
  const int d_max = static_cast<int>(
      std::min<Index>(frames, opts.d_max > 0 ? opts.d_max : durations.d_max));
  const auto units = expand(grammar, opts.background);
  const std::size_t n_units = units.size();

  // Prefix sums of frame likelihoods and duration tables for each action used.
  std::map<int, std::pair<Vector, Vector>> tables;
  for (const auto& u : units) {
    if (tables.count(u.action)) continue;
    Vector prefix(frames + 1);
    prefix[0] = 0.0;
    const double prior = scores.log_prior[u.action];
    for (Index t = 0; t < frames; ++t) prefix[t + 1] = prefix[t] + scores.log_post(u.action, t) - prior;
    Vector dur(d_max + 1);
    dur[0] = 0.0;
    for (int l = 1; l <= d_max; ++l) dur[l] = durations.log_pmf(u.action, l);
    tables.emplace(u.action, std::make_pair(std::move(prefix), std::move(dur)));
  }

  // best(u, t): best score with units [0, u) covering frames [0, t).
  Matrix best = Matrix::Constant(static_cast<Index>(n_units) + 1, frames + 1, kNegInf);
  Eigen::MatrixXi back = Eigen::MatrixXi::Zero(static_cast<Index>(n_units) + 1, frames + 1);
  best(0, 0) = 0.0;
  for (std::size_t u = 0; u < n_units; ++u) {
    const auto& [prefix, dur] = tables.at(units[u].action);
    const Index row = static_cast<Index>(u);
    for (Index t = 0; t <= frames; ++t) {
      double top = units[u].optional ? best(row, t) : kNegInf;
      int arg = 0;
      const Index longest = std::min<Index>(d_max, t);
      for (Index l = 1; l <= longest; ++l) {
        const double prev = best(row, t - l);
        if (prev == kNegInf) continue;
        const double cand = prev + (prefix[t] - prefix[t - l]) + dur[l];
        if (cand > top) {
          top = cand;
          arg = static_cast<int>(l);
        }
      }
      best(row + 1, t) = top;
      back(row + 1, t) = arg;
    }
  }

  Alignment out;
  out.log_score = best(static_cast<Index>(n_units), frames);
  if (out.log_score == kNegInf) return out;
  Index t = frames;
  for (std::size_t u = n_units; u-- > 0;) {
    const int l = back(static_cast<Index>(u) + 1, t);
    if (l > 0) out.segments.push_back({units[u].action, t - l, l});
    t -= l;
  }
  std::reverse(out.segments.begin(), out.segments.end());
  return out;
}

Segmentation decode(const FrameScores& scores, const std::vector<int>& subset,
                    const DurationModel& durations, const GrammarStore& store,
                    const DecodeOptions& opts, Diagnostics* diags) {
  if (subset.empty()) throw DataError("empty grammar subset");
  Segmentation best;
  best.log_score = kNegInf;
  Alignment winner;
  std::vector<int> order = subset;
  std::sort(order.begin(), order.end());
  for (int g : order) {
    const auto& grammar = store.all.at(g);
    if (static_cast<Index>(grammar.size()) > scores.num_frames()) {
      diag(diags, "grammar " + std::to_string(g) + " longer than video; skipped");
      continue;
    }
    ++best.grammars_evaluated;
    Alignment a = align_grammar(scores, grammar, durations, opts);
    if (a.segments.empty()) {
      diag(diags, "grammar " + std::to_string(g) + " infeasible within d_max; skipped");
      continue;
    }
    if (best.grammar < 0 || a.log_score > best.log_score) {
      best.grammar = g;
      best.log_score = a.log_score;
      winner = std::move(a);
    }
  }
  if (best.grammar < 0) throw DataError("no feasible grammar");
  best.segments = std::move(winner.segments);
  best.task = store.grammar_task[best.grammar];
  best.labels.reserve(static_cast<std::size_t>(scores.num_frames()));
  for (const auto& s : best.segments) best.labels.insert(best.labels.end(), s.length, s.action);
  return best;
}

SegmentMode parse_segment_mode(const std::string& name) {
  if (name == "topdown") return SegmentMode::kTopDown;
  if (name == "bottomup") return SegmentMode::kBottomUp;
  if (name == "oracle-task") return SegmentMode::kOracleTask;
  throw ConfigError("unknown segmentation mode: " + name);
}

std::string segment_mode_name(SegmentMode mode) {
  switch (mode) {
    case SegmentMode::kTopDown: return "topdown";
    case SegmentMode::kBottomUp: return "bottomup";
    case SegmentMode::kOracleTask: return "oracle-task";
  }
  return "?";
}

std::vector<int> grammars_for_tasks(const GrammarStore& store, const std::vector<int>& tasks,
                                    Diagnostics* diags) {
  std::vector<int> out;
  for (int t : tasks) {
    if (t >= 0 && t < static_cast<int>(store.by_task.size())) {
      out.insert(out.end(), store.by_task[t].begin(), store.by_task[t].end());
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) {
    diag(diags, "no grammar for the constraining task; decoding over all grammars");
    return store.all_indices();
  }
  return out;
}

std::vector<int> top_tasks(const Vector& scores, int m) {
  std::vector<int> idx(static_cast<std::size_t>(scores.size()));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return scores[a] > scores[b]; });
  idx.resize(std::min<std::size_t>(idx.size(), static_cast<std::size_t>(std::max(1, m))));
  return idx;
}

DecodeOptions decode_options(const ModelParams& model) {
  return {model.stats.background, model.stats.durations.d_max};
}

std::vector<int> mode_subset(const GrammarStore& store, SegmentMode mode, const Vector& task_probs,
                             int gt_task, int top_m, int* constraint, Diagnostics* diags) {
  int restrict_to = -1;
  std::vector<int> subset;
  switch (mode) {
    case SegmentMode::kBottomUp:
      subset = store.all_indices();
      break;
    case SegmentMode::kTopDown: {
      const auto tasks = top_tasks(task_probs, top_m);
      restrict_to = tasks.front();
      subset = grammars_for_tasks(store, tasks, diags);
      break;
    }
    case SegmentMode::kOracleTask:
      if (gt_task < 0) throw DataError("oracle-task mode needs the ground-truth task");
      restrict_to = gt_task;
      subset = grammars_for_tasks(store, {gt_task}, diags);
      break;
  }
  if (constraint != nullptr) *constraint = restrict_to;
  return subset;
}

Segmentation segment_scores(const ModelParams& model, const FrameScores& scores,
                            const Vector& task_probs, SegmentMode mode, int gt_task, int top_m,
                            Diagnostics* diags) {
  const auto& store = model.stats.grammars;
  int constraint = -1;
  const auto subset = mode_subset(store, mode, task_probs, gt_task, top_m, &constraint, diags);
  Segmentation s = decode(scores, subset, model.stats.durations, store, decode_options(model), diags);
  s.constraint_task = constraint;
  return s;
}

Segmentation segment_video(const ModelParams& model, const Matrix& features, SegmentMode mode,
                           int gt_task, int top_m, Diagnostics* diags) {
  const FrameScores scores = frame_scores(model, features);
  const Vector probs = mode == SegmentMode::kTopDown ? task_scores(model, features) : Vector();
  return segment_scores(model, scores, probs, mode, gt_task, top_m, diags);
}

Segmentation decode_topdown(const Matrix& features, const ModelParams& model, int top_m,
                            Diagnostics* diags) {
  return segment_video(model, features, SegmentMode::kTopDown, -1, top_m, diags);
}

}  // namespace htm
