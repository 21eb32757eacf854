// Copyright 2026 The fusionkd Authors
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

#include <span>
#include <utility>

#include "fusionkd/tensor.hpp"

// Primitive operators. Every forward op is a pure function; the matching
// *_backward takes the upstream gradient and returns gradients for its inputs.

namespace fusionkd {

double sigmoid(double x);

Tensor softmax(const Tensor& x, std::size_t axis);
Tensor softmax_backward(const Tensor& y, const Tensor& grad_y, std::size_t axis);

Tensor sigmoid(const Tensor& x);
/// Gradient w.r.t. the pre-activation given the sigmoid output `y`.
Tensor sigmoid_backward(const Tensor& y, const Tensor& grad_y);

Tensor relu(const Tensor& x);
Tensor relu_backward(const Tensor& x, const Tensor& grad_y);

/// y = x W + b applied to every trailing vector of `x`.
Tensor affine(const Tensor& x, const Tensor& w, const Tensor& b);

struct AffineGrads {
  Tensor x;
  Tensor w;
  Tensor b;
};
AffineGrads affine_backward(const Tensor& x, const Tensor& w, const Tensor& grad_y);

/// Same-size zero-padded 2-D convolution (cross-correlation), stride 1.
/// x: [C_in,H,W], k: [C_out,C_in,kh,kw] with odd kh and kw, b: [C_out].
Tensor conv2d(const Tensor& x, const Tensor& k, const Tensor& b);

struct ConvGrads {
  Tensor x;
  Tensor k;
  Tensor b;
};
ConvGrads conv2d_backward(const Tensor& x, const Tensor& k, const Tensor& grad_y);

/// Applies conv2d to every leading slice of x: [N,C_in,H,W] -> [N,C_out,H,W].
Tensor conv2d_batched(const Tensor& x, const Tensor& k, const Tensor& b);
ConvGrads conv2d_batched_backward(const Tensor& x, const Tensor& k, const Tensor& grad_y);

/// Elementwise maximum over a set of equal-length vectors; empty set -> zeros(length).
Tensor channel_max_pool(std::span<const Tensor> vectors, std::size_t length);
Tensor channel_max_pool(std::span<const Tensor> vectors);

/// Bilinear read of map[C,H,W] at fractional (row u, column v). Corners outside
/// the map read as zero.
Tensor bilinear_sample(const Tensor& map, double u, double v);

struct CoordGrad {
  double u = 0.0;
  double v = 0.0;
};
/// Accumulates d/dmap into `grad_map` (may be null) and returns d/d(u,v).
CoordGrad bilinear_sample_backward(const Tensor& map, double u, double v,
                                   std::span<const double> grad_out, Tensor* grad_map);

/// out[i,d] = c[i] * p[d].
Tensor outer_scale(const Tensor& c, const Tensor& p);

}  // namespace fusionkd
