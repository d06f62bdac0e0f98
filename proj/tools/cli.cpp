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

#include "cli.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "htm/checkpoint.hpp"
#include "htm/config.hpp"
#include "htm/corpus.hpp"
#include "htm/gradcheck.hpp"
#include "htm/metrics.hpp"
#include "htm/model.hpp"
#include "htm/segment.hpp"
#include "htm/training.hpp"

namespace htm::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kGradTolerance = 1e-4;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  return f;
}

void write_text(const fs::path& path, const std::string& text) { open_out(path) << text; }

void print_diags(const Diagnostics& diags, std::ostream& err) {
  for (const auto& d : diags) err << "warning: " << d << '\n';
}

/// Runs fn(i) for i in [0, n) on `jobs` workers. The first exception is rethrown.
template <class Fn>
void parallel_for(int n, int jobs, Fn&& fn) {
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min(jobs, n); ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_lock);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct CommonOptions {
  std::string config;
  std::vector<std::string> overrides;
  std::int64_t seed = -1;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& o, bool out_required) {
  cmd->add_option("--config", o.config, "key=value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--set", o.overrides, "key=value override (repeatable)");
  cmd->add_option("--seed", o.seed, "random seed");
  auto* out = cmd->add_option("--out", o.out, "output directory");
  if (out_required) out->required();
}

KeyValues collect(const CommonOptions& o) {
  KeyValues kv;
  if (!o.config.empty()) kv = read_key_values(o.config);
  for (const auto& [k, v] : parse_overrides(o.overrides)) kv[k] = v;
  return kv;
}

TrainConfig train_config(const CommonOptions& o) {
  TrainConfig cfg;
  htm::apply(cfg, collect(o));
  if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
  cfg.validate();
  return cfg;
}

std::string transcript_text(const ActionSeq& seq, const Vocabularies& vocab) {
  std::string s;
  for (int a : seq) {
    if (!s.empty()) s += ' ';
    s += vocab.actions[a];
  }
  return s;
}

std::string config_text(const KeyValues& kv) {
  std::string s;
  for (const auto& [k, v] : kv) s += k + "=" + v + "\n";
  return s;
}

// ---- synth ----------------------------------------------------------------

int cmd_synth(const CommonOptions& o, std::ostream& out) {
  SynthConfig cfg;
  htm::apply(cfg, collect(o));
  if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
  cfg.validate();
  const SynthCorpus data = generate_synthetic(cfg);
  const fs::path dir = o.out;
  save_corpus(data.train, dir, "train");
  save_corpus(data.test, dir, "test");
  std::string grammars;
  for (std::size_t g = 0; g < data.grammars.size(); ++g) {
    grammars += data.train.vocab.tasks[g / cfg.grammars_per_task] + " " +
                transcript_text(data.grammars[g], data.train.vocab) + "\n";
  }
  write_text(dir / "grammars.txt", grammars);
  write_text(dir / "synth.cfg", config_text(to_key_values(cfg)));
  out << "wrote " << data.train.size() << " train and " << data.test.size() << " test videos to "
      << dir.string() << '\n';
  return 0;
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::string manifest;
  std::string tasks, actions, attributes;
  bool dump_tfidf = false;
};

Corpus load_training_corpus(const TrainArgs& a) {
  const fs::path dir = fs::path(a.manifest).parent_path();
  CorpusFiles files = vocabulary_files(dir);
  if (!fs::exists(files.tasks)) files.tasks.clear();
  if (!fs::exists(files.actions)) files.actions.clear();
  if (!fs::exists(files.attributes)) files.attributes.clear();
  if (!a.tasks.empty()) files.tasks = a.tasks;
  if (!a.actions.empty()) files.actions = a.actions;
  if (!a.attributes.empty()) files.attributes = a.attributes;
  return load_corpus(a.manifest, files);
}

void write_tfidf(const ModelParams& model, const fs::path& path) {
  auto f = open_out(path);
  f << "attribute,task,tf,idf,weight,mask\n";
  const auto& t = model.tfidf;
  for (Index j = 0; j < t.w.rows(); ++j) {
    for (Index c = 0; c < t.w.cols(); ++c) {
      f << model.vocab.attributes[j] << ',' << model.vocab.tasks[c] << ',' << num(t.tf(j, c)) << ','
        << num(t.idf[j]) << ',' << num(t.w(j, c)) << ',' << t.mask(j, c) << '\n';
    }
  }
}

int cmd_train(const CommonOptions& o, const TrainArgs& a, std::ostream& out, std::ostream& err) {
  const TrainConfig cfg = train_config(o);
  const Corpus corpus = load_training_corpus(a);
  const fs::path dir = o.out;
  fs::create_directories(dir);

  auto loss_csv = open_out(dir / "loss.csv");
  loss_csv << "iteration,total,semantic,temporal,fusion\n";
  Diagnostics diags;
  const int report_every = std::max(1, cfg.iterations / 10);
  ModelParams model = train(corpus, cfg, [&](const LossRecord& r) {
    loss_csv << r.iteration << ',' << num(r.loss.total) << ',' << num(r.loss.semantic) << ','
             << num(r.loss.temporal) << ',' << num(r.loss.fusion) << '\n';
    if ((r.iteration + 1) % report_every == 0) {
      err << "iteration " << r.iteration + 1 << " loss " << r.loss.total << '\n';
    }
  }, &diags);
  fit_segmentation(corpus, cfg, model);
  round_model_to_float(model);
  save_checkpoint(model, dir / "model.wtm");
  write_text(dir / "train.cfg", config_text(to_key_values(cfg)));
  if (a.dump_tfidf) write_tfidf(model, dir / "tfidf.csv");
  print_diags(diags, err);
  out << "trained on " << corpus.size() << " videos, " << cfg.iterations << " iterations; wrote "
      << (dir / "model.wtm").string() << '\n';
  return 0;
}

// ---- classify ---------------------------------------------------------------

struct ModelArgs {
  std::string model;
  std::string manifest;
  int jobs = 1;
};

Matrix score_corpus(const ModelParams& model, const Corpus& corpus, int jobs) {
  Matrix scores(corpus.size(), model.num_tasks());
  parallel_for(corpus.size(), jobs, [&](int i) {
    scores.row(i) = task_scores(model, corpus.videos[i].features).transpose();
  });
  return scores;
}

json task_metrics_json(const TaskMetrics& m, const Vocabularies& vocab) {
  json j;
  j["t_acc"] = m.t_acc;
  j["t_map"] = m.t_map;
  json ap = json::object();
  for (std::size_t c = 0; c < m.ap.size(); ++c) {
    ap[vocab.tasks[c]] = std::isnan(m.ap[c]) ? json(nullptr) : json(m.ap[c]);
  }
  j["task_ap"] = ap;
  return j;
}

int cmd_classify(const CommonOptions& o, const ModelArgs& a, std::ostream& out, std::ostream& err) {
  const ModelParams model = load_checkpoint(a.model);
  const Corpus corpus = load_corpus(a.manifest, model.vocab);
  const Matrix scores = score_corpus(model, corpus, a.jobs);
  std::vector<int> gt;
  for (const auto& v : corpus.videos) gt.push_back(v.task);
  Diagnostics diags;
  const TaskMetrics m = task_metrics(scores, gt, &diags);

  const fs::path dir = o.out;
  auto csv = open_out(dir / "scores.csv");
  csv << "id,gt_task,predicted_task";
  for (const auto& t : model.vocab.tasks) csv << ',' << t;
  csv << '\n';
  for (int i = 0; i < corpus.size(); ++i) {
    csv << corpus.videos[i].id << ',' << model.vocab.tasks[gt[i]] << ','
        << model.vocab.tasks[m.predictions[i]];
    for (Index c = 0; c < scores.cols(); ++c) csv << ',' << num(scores(i, c));
    csv << '\n';
  }
  write_text(dir / "task_metrics.json", task_metrics_json(m, model.vocab).dump(2) + "\n");
  print_diags(diags, err);
  out << "t-acc " << m.t_acc << "  t-mAP " << m.t_map << '\n';
  return 0;
}

// ---- segment ----------------------------------------------------------------

struct SegmentArgs {
  std::string mode = "topdown";
  int top_m = 0;  // 0: model/config default
  std::string import_scores;
  bool export_scores = false;
};

struct VideoResult {
  Segmentation seg;
  Vector task_probs;
  double seconds = 0.0;
  Diagnostics diags;
};

FrameScores scores_for(const ModelParams& model, const VideoRecord& v, const SegmentArgs& s) {
  if (s.import_scores.empty()) return frame_scores(model, v.features);
  FrameScores fs_;
  fs_.log_post = read_feature_file(fs::path(s.import_scores) / (v.id + ".wte"));
  fs_.log_prior = model.stats.log_prior;
  if (fs_.log_post.rows() != model.vocab.num_actions() || fs_.log_post.cols() != v.num_frames()) {
    throw DataError("imported frame scores for " + v.id + " have the wrong shape");
  }
  return fs_;
}

std::vector<VideoResult> segment_corpus(const ModelParams& model, const Corpus& corpus,
                                        SegmentMode mode, int top_m, const SegmentArgs& s,
                                        int jobs, const fs::path& export_dir) {
  std::vector<VideoResult> results(corpus.videos.size());
  parallel_for(corpus.size(), jobs, [&](int i) {
    const auto& v = corpus.videos[i];
    VideoResult& r = results[i];
    const auto start = Clock::now();
    const FrameScores scores = scores_for(model, v, s);
    r.task_probs = task_scores(model, v.features);
    r.seg = segment_scores(model, scores, r.task_probs, mode, v.task, top_m, &r.diags);
    r.seconds = seconds_since(start);
    if (!export_dir.empty()) write_feature_file(export_dir / (v.id + ".wte"), scores.log_post);
  });
  return results;
}

int cmd_segment(const CommonOptions& o, const ModelArgs& a, const SegmentArgs& s,
                std::ostream& out, std::ostream& err) {
  const TrainConfig cfg = train_config(o);
  const SegmentMode mode = parse_segment_mode(s.mode);
  const int top_m = s.top_m > 0 ? s.top_m : cfg.top_m;
  const ModelParams model = load_checkpoint(a.model);
  const Corpus corpus = load_corpus(a.manifest, model.vocab);
  const fs::path dir = o.out;
  fs::create_directories(dir / "frames");
  fs::path export_dir;
  if (s.export_scores) {
    export_dir = dir / "frame_scores";
    fs::create_directories(export_dir);
  }

  const auto start = Clock::now();
  const auto results = segment_corpus(model, corpus, mode, top_m, s, a.jobs, export_dir);
  const double total = seconds_since(start);

  auto summary = open_out(dir / "summary.jsonl");
  long evaluated = 0;
  for (int i = 0; i < corpus.size(); ++i) {
    const auto& v = corpus.videos[i];
    const auto& r = results[i];
    auto frames = open_out(dir / "frames" / (v.id + ".csv"));
    frames << "frame,label\n";
    for (std::size_t t = 0; t < r.seg.labels.size(); ++t) {
      frames << t << ',' << model.vocab.actions[r.seg.labels[t]] << '\n';
    }
    json row;
    row["id"] = v.id;
    row["mode"] = segment_mode_name(mode);
    row["gt_task"] = model.vocab.tasks[v.task];
    row["task"] = model.vocab.tasks[r.seg.task];
    row["constraint_task"] =
        r.seg.constraint_task >= 0 ? json(model.vocab.tasks[r.seg.constraint_task]) : json(nullptr);
    row["grammar"] = r.seg.grammar;
    row["transcript"] = transcript_text(model.stats.grammars.all[r.seg.grammar], model.vocab);
    row["grammars_evaluated"] = r.seg.grammars_evaluated;
    row["log_score"] = r.seg.log_score;
    row["timing"] = {{"wall_clock_seconds", r.seconds}};
    summary << row.dump() << '\n';
    evaluated += r.seg.grammars_evaluated;
    print_diags(r.diags, err);
  }
  out << "segmented " << corpus.size() << " videos (" << segment_mode_name(mode) << "), "
      << evaluated << " grammars evaluated, " << total << " s\n";
  return 0;
}

// ---- eval -------------------------------------------------------------------

int cmd_eval(const CommonOptions& o, const ModelArgs& a, const SegmentArgs& s, std::ostream& out,
             std::ostream& err) {
  const TrainConfig cfg = train_config(o);
  const SegmentMode mode = parse_segment_mode(s.mode);
  const int top_m = s.top_m > 0 ? s.top_m : cfg.top_m;
  const ModelParams model = load_checkpoint(a.model);
  const Corpus corpus = load_corpus(a.manifest, model.vocab);
  const auto results = segment_corpus(model, corpus, mode, top_m, s, a.jobs, {});

  EvalReport report;
  report.task_names = model.vocab.tasks;
  Matrix scores(corpus.size(), model.num_tasks());
  std::vector<int> gt;
  std::vector<SegMetrics> per_video;
  for (int i = 0; i < corpus.size(); ++i) {
    scores.row(i) = results[i].task_probs.transpose();
    gt.push_back(corpus.videos[i].task);
    print_diags(results[i].diags, err);
  }
  Diagnostics diags;
  const TaskMetrics tm = task_metrics(scores, gt, &diags);
  report.t_acc = tm.t_acc;
  report.t_map = tm.t_map;
  report.task_ap = tm.ap;
  for (int i = 0; i < corpus.size(); ++i) {
    const auto& v = corpus.videos[i];
    EvalReport::Row row{v.id, v.task, tm.predictions[i], {}};
    if (v.frame_labels) {
      row.seg = segmentation_metrics(results[i].seg.labels, *v.frame_labels);
      per_video.push_back(row.seg);
    } else {
      const double nan = std::nan("");
      row.seg.acc = row.seg.acc_bg = row.seg.iou = row.seg.iod = nan;
    }
    report.videos.push_back(row);
  }
  if (per_video.empty()) {
    diag(&diags, "no frame labels in the manifest; segmentation metrics are undefined");
    report.acc = report.acc_bg = report.iou = report.iod = std::nan("");
  } else {
    const SegMetrics agg = aggregate(per_video);
    report.acc = agg.acc;
    report.acc_bg = agg.acc_bg;
    report.iou = agg.iou;
    report.iod = agg.iod;
  }

  const fs::path dir = o.out;
  write_text(dir / "report.json", report.to_json() + "\n");
  write_text(dir / "report.txt", report.to_table());
  print_diags(diags, err);
  out << report.to_table();
  return 0;
}

// ---- gradcheck --------------------------------------------------------------

struct GradArgs {
  std::string fusion = "gated";
  double step = 1e-4;
};

int cmd_gradcheck(const CommonOptions& o, const GradArgs& g, std::ostream& out) {
  if (!o.config.empty() || !o.overrides.empty()) {
    throw ConfigError("gradcheck uses the canonical instance; only --seed and --fusion apply");
  }
  GradInstanceShape shape;
  shape.fusion = parse_fusion_mode(g.fusion);
  const std::uint64_t seed = o.seed >= 0 ? static_cast<std::uint64_t>(o.seed) : 3;
  const GradInstance inst = make_grad_instance(shape, seed);
  const auto reports = standard_gradchecks(inst, g.step);

  json j;
  j["seed"] = seed;
  j["fusion"] = fusion_mode_name(shape.fusion);
  j["step"] = g.step;
  j["tolerance"] = kGradTolerance;
  json objectives = json::array();
  double worst = 0.0;
  bool stop_ok = true;
  char line[160];
  out << "objective  tensor                  max_rel_err   max_abs_err\n";
  for (const auto& r : reports) {
    json tensors = json::array();
    for (const auto& t : r.tensors) {
      tensors.push_back({{"name", t.name},
                         {"max_rel_err", t.max_rel_err},
                         {"max_abs_err", t.max_abs_err},
                         {"analytic_all_zero", t.analytic_all_zero}});
      std::snprintf(line, sizeof(line), "%-10s %-22s %12.3e  %12.3e\n", r.objective.c_str(),
                    t.name.c_str(), t.max_rel_err, t.max_abs_err);
      out << line;
      const bool stream_param = t.name.rfind("fusion.", 0) != 0;
      if (r.objective == "L_f" && fusion_stops_stream_gradient(shape.fusion) && stream_param) {
        stop_ok = stop_ok && t.analytic_all_zero && t.max_abs_err == 0.0;
      }
    }
    objectives.push_back({{"objective", r.objective}, {"max_rel_err", r.max_rel_err}, {"tensors", tensors}});
    worst = std::max(worst, r.max_rel_err);
  }
  j["objectives"] = objectives;
  j["max_rel_err"] = worst;
  j["stop_contract_holds"] = stop_ok;
  const bool pass = worst < kGradTolerance && stop_ok;
  j["pass"] = pass;
  if (!o.out.empty()) write_text(fs::path(o.out) / "gradcheck.json", j.dump(2) + "\n");
  out << "max rel. err " << worst << (pass ? "  PASS" : "  FAIL") << '\n';
  return pass ? 0 : 2;
}

// ---- bench ------------------------------------------------------------------

struct BenchArgs {
  int repeats = 3;
};

int cmd_bench(const CommonOptions& o, const ModelArgs& a, const BenchArgs& b, std::ostream& out,
              std::ostream& err) {
  const TrainConfig cfg = train_config(o);
  const ModelParams model = load_checkpoint(a.model);
  const Corpus corpus = load_corpus(a.manifest, model.vocab);
  const auto& store = model.stats.grammars;
  const DecodeOptions opts = decode_options(model);
  const int n = corpus.size();

  struct Work {
    FrameScores scores;
    std::vector<int> all, constrained;
    double classify_seconds = 0.0;
    double bottomup_seconds = 0.0;
    double topdown_seconds = 0.0;
  };
  std::vector<Work> work(static_cast<std::size_t>(n));
  Diagnostics diags;
  for (int i = 0; i < n; ++i) {
    const auto& v = corpus.videos[i];
    work[i].scores = frame_scores(model, v.features);
    const auto start = Clock::now();
    const Vector probs = task_scores(model, v.features);
    work[i].classify_seconds = seconds_since(start);
    work[i].all = store.all_indices();
    work[i].constrained = mode_subset(store, SegmentMode::kTopDown, probs, -1, cfg.top_m, nullptr, &diags);
  }

  // Minimum over repeats per video; the two modes are interleaved so drift hits both alike.
  std::vector<Segmentation> bottomup(n), topdown(n);
  parallel_for(n, a.jobs, [&](int i) {
    Work& w = work[i];
    for (int r = 0; r < b.repeats; ++r) {
      auto start = Clock::now();
      bottomup[i] = decode(w.scores, w.all, model.stats.durations, store, opts);
      const double bu = seconds_since(start);
      start = Clock::now();
      topdown[i] = decode(w.scores, w.constrained, model.stats.durations, store, opts);
      const double td = seconds_since(start);
      w.bottomup_seconds = r == 0 ? bu : std::min(w.bottomup_seconds, bu);
      w.topdown_seconds = r == 0 ? td : std::min(w.topdown_seconds, td);
    }
  });

  long bu_grammars = 0, td_grammars = 0;
  double bu_work = 0.0, td_work = 0.0, bu_s = 0.0, td_s = 0.0, cls_s = 0.0;
  for (int i = 0; i < n; ++i) {
    const double frames = static_cast<double>(corpus.videos[i].num_frames());
    bu_grammars += bottomup[i].grammars_evaluated;
    td_grammars += topdown[i].grammars_evaluated;
    for (int g : work[i].all) bu_work += frames * static_cast<double>(store.all[g].size());
    for (int g : work[i].constrained) td_work += frames * static_cast<double>(store.all[g].size());
    bu_s += work[i].bottomup_seconds;
    td_s += work[i].topdown_seconds;
    cls_s += work[i].classify_seconds;
  }
  const double predicted = bu_work > 0.0 ? td_work / bu_work : std::nan("");
  const double measured = bu_s > 0.0 ? td_s / bu_s : std::nan("");

  json j;
  j["videos"] = n;
  j["jobs"] = a.jobs;
  j["repeats"] = b.repeats;
  j["grammars"] = store.size();
  j["bottomup"] = {{"grammars_evaluated", bu_grammars}, {"grammar_work", bu_work}};
  j["topdown"] = {{"grammars_evaluated", td_grammars}, {"grammar_work", td_work}};
  j["predicted_ratio"] = predicted;
  j["timing"] = {{"bottomup_decode_seconds", bu_s},
                 {"topdown_decode_seconds", td_s},
                 {"classify_seconds", cls_s},
                 {"measured_ratio", measured},
                 {"measured_over_predicted", measured / predicted}};
  if (!o.out.empty()) write_text(fs::path(o.out) / "bench.json", j.dump(2) + "\n");

  char line[160];
  out << "mode       grammars  grammar_work   decode_s\n";
  std::snprintf(line, sizeof(line), "bottomup   %8ld  %12.0f  %9.4f\n", bu_grammars, bu_work, bu_s);
  out << line;
  std::snprintf(line, sizeof(line), "topdown    %8ld  %12.0f  %9.4f\n", td_grammars, td_work, td_s);
  out << line;
  std::snprintf(line, sizeof(line), "task classification %.4f s (top-down only)\n", cls_s);
  out << line;
  std::snprintf(line, sizeof(line), "top-down/bottom-up: measured %.3f  predicted %.3f\n", measured,
                predicted);
  out << line;
  print_diags(diags, err);
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Two-stream task recognition and grammar-constrained action segmentation"};
  app.require_subcommand(1, 1);

  CommonOptions common;
  TrainArgs train_args;
  ModelArgs model_args;
  SegmentArgs seg_args;
  GradArgs grad_args;
  BenchArgs bench_args;

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  add_common(synth, common, true);

  auto* train_cmd = app.add_subcommand("train", "train a model and fit the segmentation head");
  add_common(train_cmd, common, true);
  train_cmd->add_option("--manifest", train_args.manifest, "training manifest")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--tasks", train_args.tasks, "task vocabulary file");
  train_cmd->add_option("--actions", train_args.actions, "action vocabulary file");
  train_cmd->add_option("--attributes", train_args.attributes, "action to attribute map");
  train_cmd->add_flag("--dump-tfidf", train_args.dump_tfidf, "write tfidf.csv");

  auto add_model = [&](CLI::App* cmd) {
    add_common(cmd, common, cmd->get_name() != "bench");
    cmd->add_option("--model", model_args.model, "checkpoint")->required()->check(CLI::ExistingFile);
    cmd->add_option("--manifest", model_args.manifest, "manifest to process")->required()->check(CLI::ExistingFile);
    cmd->add_option("--jobs", model_args.jobs, "worker threads")->check(CLI::PositiveNumber);
  };
  auto add_mode = [&](CLI::App* cmd) {
    cmd->add_option("--mode", seg_args.mode, "topdown, bottomup or oracle-task")
        ->check(CLI::IsMember({"topdown", "bottomup", "oracle-task"}));
    cmd->add_option("--top-m", seg_args.top_m, "tasks admitted by the top-down constraint");
  };

  auto* classify = app.add_subcommand("classify", "score tasks and report t-acc / t-mAP");
  add_model(classify);
  auto* segment = app.add_subcommand("segment", "decode frame labels");
  add_model(segment);
  add_mode(segment);
  segment->add_option("--frame-scores", seg_args.import_scores, "directory of <id>.wte log posteriors")
      ->check(CLI::ExistingDirectory);
  segment->add_flag("--export-scores", seg_args.export_scores, "write frame_scores/<id>.wte");
  auto* eval = app.add_subcommand("eval", "full evaluation report");
  add_model(eval);
  add_mode(eval);

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
  add_common(gradcheck, common, false);
  gradcheck->add_option("--fusion", grad_args.fusion, "average, weighted or gated");
  gradcheck->add_option("--step", grad_args.step, "central difference step")->check(CLI::PositiveNumber);

  auto* bench = app.add_subcommand("bench", "constrained vs unconstrained decode timing");
  add_model(bench);
  bench->add_option("--repeats", bench_args.repeats, "timing repeats per video")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o_stream, e_stream;
    const int code = app.exit(e, o_stream, e_stream);
    out << o_stream.str();
    err << e_stream.str();
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) return cmd_synth(common, out);
    if (train_cmd->parsed()) return cmd_train(common, train_args, out, err);
    if (classify->parsed()) return cmd_classify(common, model_args, out, err);
    if (segment->parsed()) return cmd_segment(common, model_args, seg_args, out, err);
    if (eval->parsed()) return cmd_eval(common, model_args, seg_args, out, err);
    if (gradcheck->parsed()) return cmd_gradcheck(common, grad_args, out);
    if (bench->parsed()) return cmd_bench(common, model_args, bench_args, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace htm::cli
