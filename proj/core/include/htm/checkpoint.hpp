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

#include <filesystem>

#include "htm/model.hpp"

namespace htm {

/// Single-file model checkpoint: magic "WTM1", format version, a key=value metadata block
/// (hyperparameters, vocabularies, grammars), then a named index of little-endian f32 tensors.
void save_checkpoint(const ModelParams& model, const std::filesystem::path& path);
ModelParams load_checkpoint(const std::filesystem::path& path);

/// Rounds every stored real to float precision so save/load is exact.
void round_model_to_float(ModelParams& model);

}  // namespace htm
