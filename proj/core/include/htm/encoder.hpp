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

#include <random>

#include "htm/types.hpp"

namespace htm {

/// Per-frame affine layer followed by a "same"-padded temporal convolution.
struct EncoderParams {
  Matrix g_weight;  // F_g x F_in
  Vector g_bias;    // F_g
  Matrix kernels;   // F x (L * F_g); column l * F_g + g is tap l of input channel g
  int kernel_size = 15;
  double keep_rate = 0.3;

  Index input_dim() const { return g_weight.cols(); }
  Index hidden_dim() const { return g_weight.rows(); }
  Index output_dim() const { return kernels.rows(); }
  void check() const;
};

struct EncodeOptions {
  bool train = false;
  std::mt19937_64* rng = nullptr;
  const Matrix* fixed_mask = nullptr;  // reuse a recorded dropout mask (train only)
};

struct EncoderCache {
  Matrix input;  // F_in x T
  Matrix cols;   // (L * F_g) x T, zero-padded taps of the affine output
  Matrix mask;   // F x T dropout multipliers, empty in eval mode
  Matrix phi;    // F x T
};

EncoderCache encode_forward(const Matrix& features, const EncoderParams& params,
                            const EncodeOptions& opts = {});

inline Matrix encode(const Matrix& features, const EncoderParams& params, bool train,
                     std::mt19937_64* rng) {
  return encode_forward(features, params, {train, rng, nullptr}).phi;
}

/// Accumulates parameter gradients into grad given dL/dphi.
void encode_backward(const EncoderCache& cache, const Matrix& dphi, const EncoderParams& params,
                     EncoderParams& grad);

}  // namespace htm
