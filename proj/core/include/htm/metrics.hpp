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

#include <string>
#include <vector>

#include "htm/types.hpp"

namespace htm {

struct TaskMetrics {
  double t_acc = 0.0;
  double t_map = 0.0;
  std::vector<double> ap;           // per task; NaN when the task has no positive
  std::vector<int> predictions;
};

/// scores is N x |C|. AP ranks videos by descending task score (ties to the lower video index)
/// and averages precision at each positive. Tasks without positives are left out of t_map.
TaskMetrics task_metrics(const Matrix& scores, const std::vector<int>& gt,
                         Diagnostics* diags = nullptr);

struct SegMetrics {
  double acc = 0.0;
  double acc_bg = 0.0;
  double iou = 0.0;
  double iod = 0.0;
  long frames = 0;
  long non_bg_frames = 0;
  int gt_classes = 0;  // non-background classes present in gt
};

/// Frame metrics for one video. IoU/IoD average over non-background classes present in gt.
SegMetrics segmentation_metrics(const std::vector<int>& pred, const std::vector<int>& gt,
                                int background = 0);

/// Corpus-level aggregation: acc and acc-bg pool frames, IoU/IoD average per video.
SegMetrics aggregate(const std::vector<SegMetrics>& per_video);

struct EvalReport {
  double t_acc = 0.0, t_map = 0.0, acc = 0.0, acc_bg = 0.0, iou = 0.0, iod = 0.0;
  std::vector<std::string> task_names;
  std::vector<double> task_ap;
  struct Row {
    std::string id;
    int gt_task;
    int predicted_task;
    SegMetrics seg;
  };
  std::vector<Row> videos;

  std::string to_json() const;
  std::string to_table() const;
};

}  // namespace htm
