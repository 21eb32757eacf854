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

#include "fusionkd/ops.hpp"

#include <algorithm>
#include <cmath>

namespace fusionkd {

namespace {

struct AxisLayout {
  std::size_t outer = 1;
  std::size_t extent = 1;
  std::size_t inner = 1;
};

AxisLayout axis_layout(const Shape& dims, std::size_t axis) {
  if (axis >= dims.size()) {
    throw std::invalid_argument("axis " + std::to_string(axis) + " invalid for tensor " + shape_str(dims));
  }
  AxisLayout l;
  for (std::size_t i = 0; i < axis; ++i) l.outer *= dims[i];
  l.extent = dims[axis];
  for (std::size_t i = axis + 1; i < dims.size(); ++i) l.inner *= dims[i];
  return l;
}

void check_conv_shapes(const Tensor& x, const Tensor& k) {
  require(x.ndim() == 3, "conv2d: input must be [C,H,W], got " + shape_str(x.dims()));
  require(k.ndim() == 4, "conv2d: kernel must be [C_out,C_in,kh,kw], got " + shape_str(k.dims()));
  require(k.dim(1) == x.dim(0), "conv2d: kernel expects " + std::to_string(k.dim(1)) +
                                    " input channels, got " + std::to_string(x.dim(0)));
  require(k.dim(2) % 2 == 1 && k.dim(3) % 2 == 1, "conv2d: kernel extents must be odd, got " +
                                                      shape_str(k.dims()));
}

}  // namespace

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Tensor softmax(const Tensor& x, std::size_t axis) {
  const auto l = axis_layout(x.dims(), axis);
  Tensor y(x.dims());
  for (std::size_t o = 0; o < l.outer; ++o) {
    for (std::size_t in = 0; in < l.inner; ++in) {
      const std::size_t base = o * l.extent * l.inner + in;
      double m = x[base];
      for (std::size_t k = 1; k < l.extent; ++k) m = std::max(m, x[base + k * l.inner]);
      double z = 0.0;
      for (std::size_t k = 0; k < l.extent; ++k) {
        const double e = std::exp(x[base + k * l.inner] - m);
        y[base + k * l.inner] = e;
        z += e;
      }
      for (std::size_t k = 0; k < l.extent; ++k) y[base + k * l.inner] /= z;
    }
  }
  return y.finalize();
}

Tensor softmax_backward(const Tensor& y, const Tensor& grad_y, std::size_t axis) {
  require(y.same_dims(grad_y), "softmax_backward: dims mismatch");
  const auto l = axis_layout(y.dims(), axis);
  Tensor gx(y.dims());
  for (std::size_t o = 0; o < l.outer; ++o) {
    for (std::size_t in = 0; in < l.inner; ++in) {
      const std::size_t base = o * l.extent * l.inner + in;
      double dot = 0.0;
      for (std::size_t k = 0; k < l.extent; ++k) dot += y[base + k * l.inner] * grad_y[base + k * l.inner];
      for (std::size_t k = 0; k < l.extent; ++k) {
        const std::size_t i = base + k * l.inner;
        gx[i] = y[i] * (grad_y[i] - dot);
      }
    }
  }
  return gx.finalize();
}

Tensor sigmoid(const Tensor& x) {
  Tensor y(x.dims());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = sigmoid(x[i]);
  return y.finalize();
}

Tensor sigmoid_backward(const Tensor& y, const Tensor& grad_y) {
  require(y.same_dims(grad_y), "sigmoid_backward: dims mismatch");
  Tensor gx(y.dims());
  for (std::size_t i = 0; i < y.size(); ++i) gx[i] = grad_y[i] * y[i] * (1.0 - y[i]);
  return gx.finalize();
}

Tensor relu(const Tensor& x) {
  Tensor y(x.dims());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
  return y;
}

Tensor relu_backward(const Tensor& x, const Tensor& grad_y) {
  require(x.same_dims(grad_y), "relu_backward: dims mismatch");
  Tensor gx(x.dims());
  for (std::size_t i = 0; i < x.size(); ++i) gx[i] = x[i] > 0.0 ? grad_y[i] : 0.0;
  return gx;
}

Tensor affine(const Tensor& x, const Tensor& w, const Tensor& b) {
  require(w.ndim() == 2, "affine: weight must be [K,M], got " + shape_str(w.dims()));
  const std::size_t k_in = w.dim(0);
  const std::size_t m_out = w.dim(1);
  require(b.size() == m_out, "affine: bias length " + std::to_string(b.size()) + " != " + std::to_string(m_out));
  require(x.dims().back() == k_in, "affine: input inner extent " + std::to_string(x.dims().back()) +
                                       " != " + std::to_string(k_in));
  Shape out_dims = x.dims();
  out_dims.back() = m_out;
  Tensor y(out_dims);
  const std::size_t rows = x.size() / k_in;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t m = 0; m < m_out; ++m) {
      double acc = b[m];
      for (std::size_t k = 0; k < k_in; ++k) acc += x[r * k_in + k] * w[k * m_out + m];
      y[r * m_out + m] = acc;
    }
  }
  return y.finalize();
}

AffineGrads affine_backward(const Tensor& x, const Tensor& w, const Tensor& grad_y) {
  const std::size_t k_in = w.dim(0);
  const std::size_t m_out = w.dim(1);
  require(grad_y.dims().back() == m_out, "affine_backward: grad extent mismatch");
  const std::size_t rows = x.size() / k_in;
  AffineGrads g{Tensor(x.dims()), Tensor(w.dims()), Tensor({m_out})};
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t m = 0; m < m_out; ++m) {
      const double gy = grad_y[r * m_out + m];
      g.b[m] += gy;
      for (std::size_t k = 0; k < k_in; ++k) {
        g.x[r * k_in + k] += gy * w[k * m_out + m];
        g.w[k * m_out + m] += gy * x[r * k_in + k];
      }
    }
  }
  return g;
}

Tensor conv2d(const Tensor& x, const Tensor& k, const Tensor& b) {
  check_conv_shapes(x, k);
  const std::size_t c_out = k.dim(0), c_in = k.dim(1), kh = k.dim(2), kw = k.dim(3);
  require(b.size() == c_out, "conv2d: bias length mismatch");
  const auto h = static_cast<long>(x.dim(1));
  const auto w = static_cast<long>(x.dim(2));
  const long ph = static_cast<long>(kh / 2), pw = static_cast<long>(kw / 2);
  Tensor y({c_out, x.dim(1), x.dim(2)});
  const double* xs = x.data().data();
  const double* ks = k.data().data();
  double* ys = y.data().data();
  for (std::size_t o = 0; o < c_out; ++o) {
    double* yo = ys + o * h * w;
    std::fill(yo, yo + h * w, b[o]);
    for (std::size_t c = 0; c < c_in; ++c) {
      const double* xc = xs + c * h * w;
      for (std::size_t a = 0; a < kh; ++a) {
        for (std::size_t bb = 0; bb < kw; ++bb) {
          const double kv = ks[((o * c_in + c) * kh + a) * kw + bb];
          const long dr = static_cast<long>(a) - ph;
          const long dc = static_cast<long>(bb) - pw;
          const long r0 = std::max(0L, -dr), r1 = std::min(h, h - dr);
          const long c0 = std::max(0L, -dc), c1 = std::min(w, w - dc);
          for (long r = r0; r < r1; ++r) {
            const double* xr = xc + (r + dr) * w + dc;
            double* yr = yo + r * w;
            for (long cc = c0; cc < c1; ++cc) yr[cc] += kv * xr[cc];
          }
        }
      }
    }
  }
  return y.finalize();
}

ConvGrads conv2d_backward(const Tensor& x, const Tensor& k, const Tensor& grad_y) {
  check_conv_shapes(x, k);
  const std::size_t c_out = k.dim(0), c_in = k.dim(1), kh = k.dim(2), kw = k.dim(3);
  require(grad_y.dims() == Shape({c_out, x.dim(1), x.dim(2)}), "conv2d_backward: grad dims mismatch");
  const auto h = static_cast<long>(x.dim(1));
  const auto w = static_cast<long>(x.dim(2));
  const long ph = static_cast<long>(kh / 2), pw = static_cast<long>(kw / 2);
  ConvGrads g{Tensor(x.dims()), Tensor(k.dims()), Tensor({c_out})};
  const double* xs = x.data().data();
  const double* ks = k.data().data();
  const double* gys = grad_y.data().data();
  double* gxs = g.x.data().data();
  double* gks = g.k.data().data();
  for (std::size_t o = 0; o < c_out; ++o) {
    const double* go = gys + o * h * w;
    double bsum = 0.0;
    for (long i = 0; i < h * w; ++i) bsum += go[i];
    g.b[o] = bsum;
    for (std::size_t c = 0; c < c_in; ++c) {
      const double* xc = xs + c * h * w;
      double* gxc = gxs + c * h * w;
      for (std::size_t a = 0; a < kh; ++a) {
        for (std::size_t bb = 0; bb < kw; ++bb) {
          const std::size_t ki = ((o * c_in + c) * kh + a) * kw + bb;
          const double kv = ks[ki];
          const long dr = static_cast<long>(a) - ph;
          const long dc = static_cast<long>(bb) - pw;
          const long r0 = std::max(0L, -dr), r1 = std::min(h, h - dr);
          const long c0 = std::max(0L, -dc), c1 = std::min(w, w - dc);
          double kacc = 0.0;
          for (long r = r0; r < r1; ++r) {
            const double* xr = xc + (r + dr) * w + dc;
            double* gxr = gxc + (r + dr) * w + dc;
            const double* gr = go + r * w;
            for (long cc = c0; cc < c1; ++cc) {
              kacc += gr[cc] * xr[cc];
              gxr[cc] += gr[cc] * kv;
            }
          }
          gks[ki] += kacc;
        }
      }
    }
  }
  return g;
}

Tensor conv2d_batched(const Tensor& x, const Tensor& k, const Tensor& b) {
  require(x.ndim() == 4, "conv2d_batched: input must be [N,C,H,W], got " + shape_str(x.dims()));
  const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  Tensor y({n, k.dim(0), h, w});
  const std::size_t in_slice = c * h * w, out_slice = k.dim(0) * h * w;
  for (std::size_t i = 0; i < n; ++i) {
    Tensor xi({c, h, w}, std::vector<double>(x.data().begin() + i * in_slice,
                                             x.data().begin() + (i + 1) * in_slice));
    const Tensor yi = conv2d(xi, k, b);
    std::copy(yi.data().begin(), yi.data().end(), y.data().begin() + i * out_slice);
  }
  return y;
}

ConvGrads conv2d_batched_backward(const Tensor& x, const Tensor& k, const Tensor& grad_y) {
  const std::size_t n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
  const std::size_t c_out = k.dim(0);
  ConvGrads g{Tensor(x.dims()), Tensor(k.dims()), Tensor({c_out})};
  const std::size_t in_slice = c * h * w, out_slice = c_out * h * w;
  for (std::size_t i = 0; i < n; ++i) {
    Tensor xi({c, h, w}, std::vector<double>(x.data().begin() + i * in_slice,
                                             x.data().begin() + (i + 1) * in_slice));
    Tensor gi({c_out, h, w}, std::vector<double>(grad_y.data().begin() + i * out_slice,
                                                 grad_y.data().begin() + (i + 1) * out_slice));
    auto gg = conv2d_backward(xi, k, gi);
    std::copy(gg.x.data().begin(), gg.x.data().end(), g.x.data().begin() + i * in_slice);
    g.k += gg.k;
    g.b += gg.b;
  }
  return g;
}

Tensor channel_max_pool(std::span<const Tensor> vectors, std::size_t length) {
  Tensor out({length}, 0.0);
  bool first = true;
  for (const auto& v : vectors) {
    require(v.size() == length, "channel_max_pool: vector of length " + std::to_string(v.size()) +
                                    " in a set of length " + std::to_string(length));
    for (std::size_t c = 0; c < length; ++c) out[c] = first ? v[c] : std::max(out[c], v[c]);
    first = false;
  }
  return out;
}

Tensor channel_max_pool(std::span<const Tensor> vectors) {
  require(!vectors.empty(), "channel_max_pool: empty set needs an explicit length");
  return channel_max_pool(vectors, vectors.front().size());
}

Tensor bilinear_sample(const Tensor& map, double u, double v) {
  require(map.ndim() == 3, "bilinear_sample: map must be [C,H,W]");
  const std::size_t ch = map.dim(0);
  const auto h = static_cast<long>(map.dim(1));
  const auto w = static_cast<long>(map.dim(2));
  Tensor out({ch}, 0.0);
  const double fu = std::floor(u), fv = std::floor(v);
  const long r0 = static_cast<long>(fu), c0 = static_cast<long>(fv);
  const double au = u - fu, av = v - fv;
  const double wts[4] = {(1 - au) * (1 - av), (1 - au) * av, au * (1 - av), au * av};
  const long rr[4] = {r0, r0, r0 + 1, r0 + 1};
  const long cc[4] = {c0, c0 + 1, c0, c0 + 1};
  for (int q = 0; q < 4; ++q) {
    if (rr[q] < 0 || rr[q] >= h || cc[q] < 0 || cc[q] >= w || wts[q] == 0.0) continue;
    for (std::size_t c = 0; c < ch; ++c) out[c] += wts[q] * map[(c * h + rr[q]) * w + cc[q]];
  }
  return out.finalize();
}

CoordGrad bilinear_sample_backward(const Tensor& map, double u, double v,
                                   std::span<const double> grad_out, Tensor* grad_map) {
  const std::size_t ch = map.dim(0);
  const auto h = static_cast<long>(map.dim(1));
  const auto w = static_cast<long>(map.dim(2));
  require(grad_out.size() == ch, "bilinear_sample_backward: grad length mismatch");
  const double fu = std::floor(u), fv = std::floor(v);
  const long r0 = static_cast<long>(fu), c0 = static_cast<long>(fv);
  const double au = u - fu, av = v - fv;
  const double wts[4] = {(1 - au) * (1 - av), (1 - au) * av, au * (1 - av), au * av};
  const double du[4] = {-(1 - av), -av, (1 - av), av};
  const double dv[4] = {-(1 - au), (1 - au), -au, au};
  const long rr[4] = {r0, r0, r0 + 1, r0 + 1};
  const long cc[4] = {c0, c0 + 1, c0, c0 + 1};
  CoordGrad g;
  for (int q = 0; q < 4; ++q) {
    if (rr[q] < 0 || rr[q] >= h || cc[q] < 0 || cc[q] >= w) continue;
    double dot = 0.0;
    for (std::size_t c = 0; c < ch; ++c) {
      const std::size_t idx = (c * h + rr[q]) * w + cc[q];
      dot += grad_out[c] * map[idx];
      if (grad_map) (*grad_map)[idx] += wts[q] * grad_out[c];
    }
    g.u += du[q] * dot;
    g.v += dv[q] * dot;
  }
  return g;
}

Tensor outer_scale(const Tensor& c, const Tensor& p) {
  Tensor out({c.size(), p.size()});
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t d = 0; d < p.size(); ++d) out[i * p.size() + d] = c[i] * p[d];
  }
  return out.finalize();
}

}  // namespace fusionkd
