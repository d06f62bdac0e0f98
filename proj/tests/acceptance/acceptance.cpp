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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits non-zero on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "htm/gradcheck.hpp"
#include "htm/metrics.hpp"
#include "htm/segment.hpp"
#include "htm/tfidf.hpp"
#include "htm/ths.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace htm;
using json = nlohmann::json;

namespace {

// Tolerances and budgets.
constexpr double kTfidfTol = 1e-12;
constexpr double kColumnSumTol = 1e-6;  // eps sits in the column normalizer
constexpr double kTfidfSeconds = 5.0;
constexpr double kGradTol = 1e-4;
constexpr double kGradSeconds = 30.0;
constexpr double kAlignTol = 1e-9;
constexpr double kAlignSeconds = 10.0;
constexpr double kDropoutTol = 1e-15;  // relative to the largest input entry, rounding only
constexpr double kMinTaskAcc = 0.90;
constexpr double kMinTaskMap = 0.90;
constexpr double kEndToEndSeconds = 300.0;
constexpr double kTopdownSlack = 0.01;
constexpr double kMaxSpeedRatio = 0.35;
constexpr double kRatioAgreement = 0.20;
constexpr double kBenchSeconds = 120.0;
constexpr double kMetricTol = 1e-12;
constexpr double kApExample = 0.8333;
constexpr double kApTol = 5e-5;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& name, const Outcome& o) {
  std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str());
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), f, a, b, c, d);
  return buf;
}

struct RunResult {
  int code;
  std::string out, err;
};

RunResult htm_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "htm");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

void require_ok(const RunResult& r, const std::string& what) {
  if (r.code != 0) throw std::runtime_error(what + " failed: " + r.err);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

// ---- criteria ---------------------------------------------------------------

Outcome tfidf_equivalence() {
  const auto start = Clock::now();
  std::mt19937_64 rng(1);
  double worst = 0.0, worst_col = 0.0;
  bool masks = true, support = true;
  for (int trial = 0; trial < 100; ++trial) {
    const Corpus c = htm::testing::random_label_corpus(rng, 6, 4, 20);
    const TfidfTables t = build_tfidf(c);
    const auto o = htm::testing::tfidf_oracle(c, t.eps);
    for (int j = 0; j < c.vocab.num_attributes(); ++j) {
      worst = std::max(worst, std::abs(t.idf[j] - o.idf[j]));
      for (int k = 0; k < c.vocab.num_tasks(); ++k) {
        worst = std::max({worst, std::abs(t.tf(j, k) - o.tf[j][k]), std::abs(t.w(j, k) - o.w[j][k])});
        masks = masks && t.mask(j, k) == o.mask[j][k];
      }
    }
    for (int k = 0; k < c.vocab.num_tasks(); ++k) {
      const double col = t.w.col(k).sum();
      if (col != 0.0) worst_col = std::max(worst_col, std::abs(col - 1.0));
    }
    for (const auto& v : c.videos) {
      const Vector target = weighted_attribute_target(v, t);
      const auto expect = htm::testing::weighted_target_oracle(v, o);
      for (int j = 0; j < c.vocab.num_attributes(); ++j) {
        worst = std::max(worst, std::abs(target[j] - expect[j]));
        support = support && (v.attributes.count(j) || target[j] == 0.0);
      }
    }
  }
  const double secs = since(start);
  const bool pass = worst <= kTfidfTol && worst_col <= kColumnSumTol && masks && support &&
                    secs < kTfidfSeconds;
  return {pass, fmt("100 corpora, max |diff| %.2e (tol %.0e), max |colsum-1| %.2e, %.2f s", worst,
                    kTfidfTol, worst_col, secs) +
                    (masks ? "" : ", mask mismatch") + (support ? "" : ", target off support")};
}

Outcome gradient_suite() {
  const auto start = Clock::now();
  const GradInstance inst = make_grad_instance(GradInstanceShape{}, 3);
  const auto reports = standard_gradchecks(inst);
  double worst = 0.0;
  bool stop_zero = true;
  std::string per;
  for (const auto& r : reports) {
    worst = std::max(worst, r.max_rel_err);
    per += " " + r.objective + "=" + fmt("%.1e", r.max_rel_err);
    if (r.objective != "L_f") continue;
    for (const auto& t : r.tensors) {
      if (t.name.rfind("fusion.", 0) == 0) continue;
      stop_zero = stop_zero && t.analytic_all_zero && t.max_abs_err == 0.0;
    }
  }
  const double secs = since(start);
  return {worst < kGradTol && stop_zero && secs < kGradSeconds,
          "max rel. err" + per + fmt(" (tol %.0e), stream gradient of L_f ", kGradTol) +
              (stop_zero ? "exactly 0" : "NONZERO") + fmt(", %.2f s", secs)};
}

Outcome decoder_exactness() {
  const auto start = Clock::now();
  std::mt19937_64 rng(2);
  double worst = 0.0;
  int mismatched = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Index T = 1 + static_cast<Index>(rng() % 8);
    const int actions = 5;
    const auto scores = htm::testing::random_frame_scores(rng, actions, T);
    const int S = 1 + static_cast<int>(rng() % std::min<Index>(3, T));
    ActionSeq grammar;
    while (static_cast<int>(grammar.size()) < S) {
      const int a = 1 + static_cast<int>(rng() % (actions - 1));
      if (grammar.empty() || grammar.back() != a) grammar.push_back(a);
    }
    DurationModel d;
    d.lambda = Vector::NullaryExpr(actions, [&] { return 1.0 + static_cast<double>(rng() % 60) / 10.0; });
    d.d_max = static_cast<int>(T);
    const auto fast = align_grammar(scores, grammar, d, {false, static_cast<int>(T)});
    const auto brute = htm::testing::brute_force_align(scores, grammar, d, false, static_cast<int>(T));
    worst = std::max(worst, std::abs(fast.log_score - brute.log_score));
    mismatched += fast.segments != brute.segments;
  }
  const double secs = since(start);
  return {worst <= kAlignTol && mismatched == 0 && secs < kAlignSeconds,
          fmt("200 instances, max |score diff| %.2e (tol %.0e), %.0f argmax mismatches, %.2f s",
              worst, kAlignTol, mismatched, secs)};
}

Outcome dropout_identity() {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 3.0);
  std::string detail;
  bool pass = true;
  for (int K : {2, 3, 5}) {
    const Matrix v = Matrix::NullaryExpr(K, 6, [&] { return n(rng); });
    Matrix mean = Matrix::Zero(K, 6);
    for (int k = 0; k < K; ++k) mean += stage_dropout_at(v, k);
    mean /= static_cast<double>(K);
    const double err = (mean - v).cwiseAbs().maxCoeff() / v.cwiseAbs().maxCoeff();
    pass = pass && err <= kDropoutTol;
    detail += fmt("K=%.0f rel. dev %.1e; ", K, err);
  }
  return {pass, detail + fmt("tol %.0e (floating-point rounding only)", kDropoutTol)};
}

struct Pipeline {
  fs::path root;
  double train_seconds = 0.0;
  json eval[3];
};

const char* kModes[3] = {"topdown", "bottomup", "oracle-task"};

Pipeline run_pipeline(const fs::path& root) {
  Pipeline p;
  p.root = root;
  const auto start = Clock::now();
  require_ok(htm_cli({"synth", "--seed", "7", "--out", (root / "data").string()}), "synth");
  require_ok(htm_cli({"train", "--manifest", (root / "data/train.manifest").string(), "--config",
                      HTM_SOURCE_DIR "/configs/synthetic.cfg", "--seed", "1", "--out",
                      (root / "model").string()}),
             "train");
  for (int m = 0; m < 3; ++m) {
    const fs::path out = root / (std::string("eval_") + kModes[m]);
    require_ok(htm_cli({"eval", "--model", (root / "model/model.wtm").string(), "--manifest",
                        (root / "data/test.manifest").string(), "--mode", kModes[m], "--out",
                        out.string()}),
               "eval");
    p.eval[m] = read_json(out / "report.json");
  }
  p.train_seconds = since(start);
  return p;
}

Outcome end_to_end(const Pipeline& p) {
  const double acc = p.eval[0]["t_acc"], map = p.eval[0]["t_map"];
  return {acc >= kMinTaskAcc && map >= kMinTaskMap && p.train_seconds < kEndToEndSeconds,
          fmt("held-out t-acc %.4f (min %.2f), t-mAP %.4f (min %.2f)", acc, kMinTaskAcc, map,
              kMinTaskMap) +
              fmt(", synth+train+eval %.1f s", p.train_seconds)};
}

Outcome topdown_gain(const Pipeline& p) {
  const double td = p.eval[0]["acc_bg"], bu = p.eval[1]["acc_bg"], gt = p.eval[2]["acc_bg"];
  return {td >= bu - kTopdownSlack && gt >= td,
          fmt("acc-bg topdown %.4f, bottom-up %.4f (need topdown >= bottom-up - %.2f), oracle-task %.4f",
              td, bu, kTopdownSlack, gt)};
}

Outcome speedup(const Pipeline& p) {
  const auto start = Clock::now();
  const fs::path out = p.root / "bench";
  require_ok(htm_cli({"bench", "--model", (p.root / "model/model.wtm").string(), "--manifest",
                      (p.root / "data/test.manifest").string(), "--jobs", "1", "--out", out.string()}),
             "bench");
  const double secs = since(start);
  const json j = read_json(out / "bench.json");
  const double predicted = j["predicted_ratio"];
  const double measured = j["timing"]["measured_ratio"];
  const double grammar_share = static_cast<double>(j["topdown"]["grammars_evaluated"]) /
                               static_cast<double>(j["bottomup"]["grammars_evaluated"]);
  const double agreement = std::abs(measured / predicted - 1.0);
  return {measured <= kMaxSpeedRatio && agreement <= kRatioAgreement && secs < kBenchSeconds,
          fmt("grammar share %.3f, measured ratio %.3f (max %.2f), predicted %.3f", grammar_share,
              measured, kMaxSpeedRatio, predicted) +
              fmt(", |measured/predicted-1| %.3f (max %.2f), %.1f s", agreement, kRatioAgreement,
                  secs)};
}

Outcome metrics_oracle() {
  const auto hand = segmentation_metrics({0, 1, 2, 2}, {0, 1, 1, 2});
  bool pass = std::abs(hand.acc - 0.75) <= kMetricTol && std::abs(hand.acc_bg - 2.0 / 3.0) <= kMetricTol &&
              std::abs(hand.iou - 0.5) <= kMetricTol && std::abs(hand.iod - 0.75) <= kMetricTol;
  std::mt19937_64 rng(8);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 20;
    std::vector<int> pred(n), gt(n);
    for (auto& x : pred) x = static_cast<int>(rng() % 5);
    for (auto& x : gt) x = static_cast<int>(rng() % 5);
    const auto m = segmentation_metrics(pred, gt);
    const auto o = htm::testing::metrics_oracle(pred, gt, 0);
    worst = std::max({worst, std::abs(m.acc - o.acc), std::abs(m.acc_bg - o.acc_bg)});
    if (o.has_classes) worst = std::max({worst, std::abs(m.iou - o.iou), std::abs(m.iod - o.iod)});
  }
  Matrix scores(3, 2);
  scores << 0.9, 0.1, 0.8, 0.2, 0.7, 0.3;
  const double ap = task_metrics(scores, {0, 1, 0}).ap[0];
  pass = pass && worst <= kMetricTol && std::abs(ap - kApExample) <= kApTol;
  return {pass, fmt("hand example acc %.4f acc-bg %.4f IoU %.4f IoD %.4f", hand.acc, hand.acc_bg,
                    hand.iou, hand.iod) +
                    fmt("; 100 oracle pairs max |diff| %.1e; AP %.4f", worst, ap)};
}

// Reruns every subcommand and compares its outputs byte for byte; "timing" objects are removed
// from JSON and JSON-lines files first.
std::string normalized(const fs::path& p) {
  const std::string text = slurp(p);
  const auto ext = p.extension();
  if (ext == ".json") {
    json j = json::parse(text);
    j.erase("timing");
    return j.dump();
  }
  if (ext == ".jsonl") {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line)) {
      json j = json::parse(line);
      j.erase("timing");
      out += j.dump() + "\n";
    }
    return out;
  }
  return text;
}

std::vector<fs::path> files_under(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), dir));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Outcome determinism(const fs::path& root) {
  const auto run_all = [&](const fs::path& dir) {
    const std::string d = dir.string();
    const std::string model = d + "/train/model.wtm";
    const std::string test = d + "/synth/test.manifest";
    require_ok(htm_cli({"synth", "--seed", "11", "--out", d + "/synth", "--set", "videos_per_task=4",
                        "--set", "test_videos_per_task=2"}),
               "synth");
    require_ok(htm_cli({"train", "--manifest", d + "/synth/train.manifest", "--seed", "5", "--out",
                        d + "/train", "--dump-tfidf", "--set", "iterations=60", "--set", "F_g=32",
                        "--set", "L=5", "--set", "action_head_iterations=50", "--set",
                        "realign_rounds=1"}),
               "train");
    require_ok(htm_cli({"classify", "--model", model, "--manifest", test, "--out", d + "/classify"}),
               "classify");
    for (const char* mode : kModes) {
      require_ok(htm_cli({"segment", "--model", model, "--manifest", test, "--mode", mode,
                          "--export-scores", "--out", d + "/segment_" + mode}),
                 "segment");
    }
    require_ok(htm_cli({"segment", "--model", model, "--manifest", test, "--frame-scores",
                        d + "/segment_topdown/frame_scores", "--out", d + "/segment_imported"}),
               "segment --frame-scores");
    require_ok(htm_cli({"eval", "--model", model, "--manifest", test, "--jobs", "2", "--out",
                        d + "/eval"}),
               "eval");
    require_ok(htm_cli({"gradcheck", "--seed", "4", "--out", d + "/gradcheck"}), "gradcheck");
    require_ok(htm_cli({"bench", "--model", model, "--manifest", test, "--repeats", "1", "--out",
                        d + "/bench"}),
               "bench");
  };
  const auto start = Clock::now();
  run_all(root / "a");
  run_all(root / "b");
  const auto fa = files_under(root / "a"), fb = files_under(root / "b");
  int differing = 0;
  if (fa != fb) differing = -1;
  for (std::size_t i = 0; differing >= 0 && i < fa.size(); ++i) {
    if (normalized(root / "a" / fa[i]) != normalized(root / "b" / fa[i])) {
      ++differing;
      std::printf("  differs: %s\n", fa[i].string().c_str());
    }
  }
  return {differing == 0, fmt("8 subcommands run twice, %.0f files compared, ", fa.size()) +
                              (differing < 0 ? "file sets differ" : fmt("%.0f differ", differing)) +
                              fmt(", %.1f s", since(start))};
}

template <typename F>
Outcome guarded(F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

int main() {
  const fs::path root =
      fs::temp_directory_path() / ("htm_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  fs::create_directories(root);

  report(1, "TF-IDF oracle equivalence", guarded(tfidf_equivalence));
  report(2, "gradient suite", guarded(gradient_suite));
  report(3, "decoder exactness", guarded(decoder_exactness));
  report(4, "stage-dropout identity", guarded(dropout_identity));

  Pipeline pipeline;
  std::string pipeline_error;
  try {
    pipeline = run_pipeline(root / "e2e");
  } catch (const std::exception& e) {
    pipeline_error = e.what();
  }
  const auto needs_pipeline = [&](auto check) {
    return [&, check]() -> Outcome {
      if (!pipeline_error.empty()) return {false, "pipeline failed: " + pipeline_error};
      return check(pipeline);
    };
  };
  report(5, "end-to-end synthetic recognition", guarded(needs_pipeline(end_to_end)));
  report(6, "top-down segmentation ordering", guarded(needs_pipeline(topdown_gain)));
  report(7, "top-down decode speedup", guarded(needs_pipeline(speedup)));
  report(8, "metrics oracle", guarded(metrics_oracle));
  report(9, "CLI determinism", guarded([&] { return determinism(root / "determinism"); }));

  std::error_code ec;
  fs::remove_all(root, ec);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
