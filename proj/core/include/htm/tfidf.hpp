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

#include "htm/corpus.hpp"
#include "htm/types.hpp"

namespace htm {

/// Attribute relevance per task. All matrices are |A| x |C|.
struct TfidfTables {
  Matrix tf;
  Vector idf;
  Matrix w;
  Matrix mask;  // 0/1
  double eps = 1e-8;
};

/// Natural-log IDF. Attributes seen in no video get idf 0 and a diagnostic.
TfidfTables build_tfidf(const Corpus& corpus, double eps = 1e-8, Diagnostics* diags = nullptr);

/// Relevance-weighted attribute target for one video, normalized to sum to 1.
/// Falls back to uniform over the video's attributes when every weight is zero.
Vector weighted_attribute_target(const VideoRecord& video, const TfidfTables& tables);

}  // namespace htm
