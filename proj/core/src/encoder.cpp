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

#include "htm/encoder.hpp"

#include <algorithm>

namespace htm {

void EncoderParams::check() const {
  if (kernel_size < 1 || kernel_size % 2 == 0) throw ConfigError("kernel size L must be odd");
  if (g_bias.size() != g_weight.rows()) throw DataError("encoder bias shape mismatch");
  if (kernels.cols() != kernel_size * g_weight.rows()) throw DataError("kernel shape mismatch");
  if (!(keep_rate > 0.0 && keep_rate <= 1.0)) throw ConfigError("keep_rate must be in (0,1]");
}

EncoderCache encode_forward(const Matrix& features, const EncoderParams& params,
                            const EncodeOptions& opts) {
  if (features.rows() != params.input_dim()) throw DataError("encoder input dimension mismatch");
  if (features.cols() < 1) throw DataError("encoder input has no frames");
  const Index frames = features.cols();
  const Index hidden = params.hidden_dim();
  const int taps = params.kernel_size;
  const int half = (taps - 1) / 2;

  EncoderCache c;
  c.input = features;
  Matrix y = params.g_weight * features;
  y.colwise() += params.g_bias;

  c.cols = Matrix::Zero(taps * hidden, frames);
  for (int l = 0; l < taps; ++l) {
    // cols(l, t) = y(t + l - half)
    const Index shift = l - half;
    const Index dst_begin = std::max<Index>(0, -shift);
    const Index dst_end = std::min<Index>(frames, frames - shift);
    if (dst_end <= dst_begin) continue;
    c.cols.block(l * hidden, dst_begin, hidden, dst_end - dst_begin) =
        y.middleCols(dst_begin + shift, dst_end - dst_begin);
  }
  c.phi.noalias() = params.kernels * c.cols;

  if (opts.train && params.keep_rate < 1.0) {
    if (opts.fixed_mask != nullptr) {
      c.mask = *opts.fixed_mask;
    } else {
      if (opts.rng == nullptr) throw std::invalid_argument("training-mode encode needs an rng");
      std::bernoulli_distribution keep(params.keep_rate);
      c.mask.resize(c.phi.rows(), c.phi.cols());
      for (Index t = 0; t < c.mask.cols(); ++t) {
        for (Index f = 0; f < c.mask.rows(); ++f) {
          c.mask(f, t) = keep(*opts.rng) ? 1.0 / params.keep_rate : 0.0;
        }
      }
    }
    c.phi.array() *= c.mask.array();
  }
  return c;
}

void encode_backward(const EncoderCache& cache, const Matrix& dphi, const EncoderParams& params,
                     EncoderParams& grad) {
  const Index frames = cache.phi.cols();
  const Index hidden = params.hidden_dim();
  const int taps = params.kernel_size;
  const int half = (taps - 1) / 2;

  Matrix dpre = cache.mask.size() > 0 ? Matrix(dphi.array() * cache.mask.array()) : dphi;
  grad.kernels.noalias() += dpre * cache.cols.transpose();
  const Matrix dcols = params.kernels.transpose() * dpre;

  Matrix dy = Matrix::Zero(hidden, frames);
  for (int l = 0; l < taps; ++l) {
    const Index shift = l - half;
    const Index dst_begin = std::max<Index>(0, -shift);
    const Index dst_end = std::min<Index>(frames, frames - shift);
    if (dst_end <= dst_begin) continue;
    dy.middleCols(dst_begin + shift, dst_end - dst_begin) +=
        dcols.block(l * hidden, dst_begin, hidden, dst_end - dst_begin);
  }
  grad.g_weight.noalias() += dy * cache.input.transpose();
  grad.g_bias += dy.rowwise().sum();
}

}  // namespace htm
