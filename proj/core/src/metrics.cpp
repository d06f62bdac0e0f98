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

#include "htm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "htm/nn.hpp"

namespace htm {

TaskMetrics task_metrics(const Matrix& scores, const std::vector<int>& gt, Diagnostics* diags) {
  const Index n = scores.rows();
  if (n < 1) throw DataError("task_metrics needs at least one video");
  if (static_cast<Index>(gt.size()) != n) throw DataError("score/label count mismatch");
  TaskMetrics m;
  int correct = 0;
  for (Index i = 0; i < n; ++i) {
    const int p = argmax(scores.row(i).transpose());
    m.predictions.push_back(p);
    correct += p == gt[i] ? 1 : 0;
  }
  m.t_acc = static_cast<double>(correct) / static_cast<double>(n);

  double ap_sum = 0.0;
  int ap_count = 0;
  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index c = 0; c < scores.cols(); ++c) {
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return scores(a, c) > scores(b, c); });
    int hits = 0;
    double precision_sum = 0.0;
    for (std::size_t r = 0; r < order.size(); ++r) {
      if (gt[order[r]] == c) {
        ++hits;
        precision_sum += static_cast<double>(hits) / static_cast<double>(r + 1);
      }
    }
    if (hits == 0) {
      diag(diags, "task " + std::to_string(c) + " has no positive video; excluded from t-mAP");
      m.ap.push_back(std::numeric_limits<double>::quiet_NaN());
      continue;
    }
    m.ap.push_back(precision_sum / hits);
    ap_sum += m.ap.back();
    ++ap_count;
  }
  m.t_map = ap_count > 0 ? ap_sum / ap_count : 0.0;
  return m;
}

SegMetrics segmentation_metrics(const std::vector<int>& pred, const std::vector<int>& gt,
                                int background) {
  if (pred.size() != gt.size()) throw DataError("prediction/ground-truth length mismatch");
  SegMetrics m;
  m.frames = static_cast<long>(gt.size());
  long hit = 0, hit_bg = 0;
  std::set<int> classes;
  for (std::size_t t = 0; t < gt.size(); ++t) {
    hit += pred[t] == gt[t];
    if (gt[t] != background) {
      ++m.non_bg_frames;
      hit_bg += pred[t] == gt[t];
      classes.insert(gt[t]);
    }
  }
  m.acc = m.frames > 0 ? static_cast<double>(hit) / m.frames : 0.0;
  m.acc_bg = m.non_bg_frames > 0 ? static_cast<double>(hit_bg) / m.non_bg_frames : 0.0;
  m.gt_classes = static_cast<int>(classes.size());
  for (int c : classes) {
    long inter = 0, uni = 0, det = 0;
    for (std::size_t t = 0; t < gt.size(); ++t) {
      const bool p = pred[t] == c, g = gt[t] == c;
      inter += p && g;
      uni += p || g;
      det += p;
    }
    m.iou += static_cast<double>(inter) / static_cast<double>(uni);
    m.iod += det > 0 ? static_cast<double>(inter) / static_cast<double>(det) : 0.0;
  }
  if (!classes.empty()) {
    m.iou /= static_cast<double>(classes.size());
    m.iod /= static_cast<double>(classes.size());
  }
  return m;
}

SegMetrics aggregate(const std::vector<SegMetrics>& per_video) {
  SegMetrics out;
  double hit = 0.0, hit_bg = 0.0;
  int videos_with_classes = 0;
  for (const auto& m : per_video) {
    out.frames += m.frames;
    out.non_bg_frames += m.non_bg_frames;
    hit += m.acc * static_cast<double>(m.frames);
    hit_bg += m.acc_bg * static_cast<double>(m.non_bg_frames);
    if (m.gt_classes > 0) {
      out.iou += m.iou;
      out.iod += m.iod;
      ++videos_with_classes;
    }
    out.gt_classes = std::max(out.gt_classes, m.gt_classes);
  }
  out.acc = out.frames > 0 ? hit / static_cast<double>(out.frames) : 0.0;
  out.acc_bg = out.non_bg_frames > 0 ? hit_bg / static_cast<double>(out.non_bg_frames) : 0.0;
  if (videos_with_classes > 0) {
    out.iou /= videos_with_classes;
    out.iod /= videos_with_classes;
  }
  return out;
}

std::string EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["t_acc"] = t_acc;
  j["t_map"] = t_map;
  j["acc"] = acc;
  j["acc_bg"] = acc_bg;
  j["iou"] = iou;
  j["iod"] = iod;
  auto& ap = j["task_ap"] = nlohmann::ordered_json::object();
  for (std::size_t c = 0; c < task_ap.size(); ++c) {
    const std::string name = c < task_names.size() ? task_names[c] : std::to_string(c);
    ap[name] = std::isnan(task_ap[c]) ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(task_ap[c]);
  }
  auto& rows = j["videos"] = nlohmann::ordered_json::array();
  for (const auto& r : videos) {
    rows.push_back({{"id", r.id},
                    {"gt_task", r.gt_task},
                    {"predicted_task", r.predicted_task},
                    {"acc", r.seg.acc},
                    {"acc_bg", r.seg.acc_bg},
                    {"iou", r.seg.iou},
                    {"iod", r.seg.iod}});
  }
  return j.dump(2);
}

std::string EvalReport::to_table() const {
  std::ostringstream os;
  char buf[128];
  os << "metric   value\n";
  const std::pair<const char*, double> rows[] = {{"t-acc", t_acc}, {"t-mAP", t_map}, {"acc", acc},
                                                 {"acc-bg", acc_bg}, {"IoU", iou}, {"IoD", iod}};
  for (const auto& [name, v] : rows) {
    std::snprintf(buf, sizeof(buf), "%-8s %7.4f\n", name, v);
    os << buf;
  }
  return os.str();
}

}  // namespace htm
