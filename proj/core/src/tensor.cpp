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

#include "fusionkd/tensor.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace fusionkd {

namespace {

std::atomic<Precision> g_precision{Precision::f32};

std::size_t product(const Shape& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

void check_dims(const Shape& dims) {
  if (dims.empty()) throw std::invalid_argument("tensor needs at least one dimension");
  for (auto d : dims) {
    if (d == 0) throw std::invalid_argument("tensor extents must be positive: " + shape_str(dims));
  }
}

constexpr std::array<char, 4> kMagic{'I', 'M', 'K', 'D'};
constexpr std::uint32_t kDumpVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  const std::array<char, 4> b{static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                              static_cast<char>((v >> 16) & 0xFF),
                              static_cast<char>((v >> 24) & 0xFF)};
  os.write(b.data(), 4);
}

template <typename Word>
void put_word(std::ostream& os, Word w) {
  std::array<char, sizeof(Word)> b{};
  for (std::size_t i = 0; i < sizeof(Word); ++i) b[i] = static_cast<char>((w >> (8 * i)) & 0xFF);
  os.write(b.data(), b.size());
}

template <typename Word>
Word get_word(std::istream& is) {
  std::array<unsigned char, sizeof(Word)> b{};
  is.read(reinterpret_cast<char*>(b.data()), b.size());
  if (!is) throw std::runtime_error("truncated tensor dump");
  Word w = 0;
  for (std::size_t i = 0; i < sizeof(Word); ++i) w |= static_cast<Word>(b[i]) << (8 * i);
  return w;
}

}  // namespace

Precision precision() { return g_precision.load(std::memory_order_relaxed); }
void set_precision(Precision p) { g_precision.store(p, std::memory_order_relaxed); }

std::string shape_str(const Shape& dims) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < dims.size(); ++i) os << (i ? "," : "") << dims[i];
  os << ']';
  return os.str();
}

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

Tensor::Tensor(Shape dims, double fill) : dims_(std::move(dims)) {
  check_dims(dims_);
  data_.assign(product(dims_), fill);
}

Tensor::Tensor(Shape dims, std::vector<double> values) : dims_(std::move(dims)), data_(std::move(values)) {
  check_dims(dims_);
  if (data_.size() != product(dims_)) {
    throw std::invalid_argument("tensor payload of " + std::to_string(data_.size()) +
                                " values does not match dims " + shape_str(dims_));
  }
}

std::size_t Tensor::offset(std::initializer_list<std::size_t> idx) const {
  if (idx.size() != dims_.size()) {
    throw std::invalid_argument("index rank " + std::to_string(idx.size()) + " for tensor " +
                                shape_str(dims_));
  }
  std::size_t off = 0;
  std::size_t axis = 0;
  for (auto i : idx) {
    if (i >= dims_[axis]) throw std::out_of_range("tensor index out of range");
    off = off * dims_[axis] + i;
    ++axis;
  }
  return off;
}

Tensor& Tensor::finalize() {
  const bool narrow = precision() == Precision::f32;
  for (auto& v : data_) {
    if (narrow) v = static_cast<double>(static_cast<float>(v));
    if (!std::isfinite(v)) throw NumericError("non-finite value in tensor " + shape_str(dims_));
  }
  return *this;
}

double finalize_scalar(double v) {
  if (precision() == Precision::f32) v = static_cast<double>(static_cast<float>(v));
  if (!std::isfinite(v)) throw NumericError("non-finite scalar");
  return v;
}

Tensor Tensor::reshaped(Shape dims) const {
  return Tensor(std::move(dims), data_);
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

Tensor& Tensor::operator+=(const Tensor& other) {
  require(same_dims(other), "tensor add: dims " + shape_str(dims_) + " vs " + shape_str(other.dims_));
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
  require(same_dims(other), "tensor sub: dims " + shape_str(dims_) + " vs " + shape_str(other.dims_));
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Tensor& Tensor::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

double Tensor::sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

double Tensor::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

Tensor operator+(Tensor a, const Tensor& b) { return a += b; }
Tensor operator-(Tensor a, const Tensor& b) { return a -= b; }
Tensor operator*(Tensor a, double s) { return a *= s; }

double max_abs_diff(const Tensor& a, const Tensor& b) {
  require(a.same_dims(b), "max_abs_diff: dims " + shape_str(a.dims()) + " vs " + shape_str(b.dims()));
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

void write_dump(std::ostream& os, const Tensor& t, Precision dtype) {
  os.write(kMagic.data(), kMagic.size());
  put_u32(os, kDumpVersion);
  put_u32(os, static_cast<std::uint32_t>(dtype));
  put_u32(os, static_cast<std::uint32_t>(t.ndim()));
  for (auto d : t.dims()) put_u32(os, static_cast<std::uint32_t>(d));
  for (double v : t.data()) {
    if (dtype == Precision::f32) {
      put_word(os, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    } else {
      put_word(os, std::bit_cast<std::uint64_t>(v));
    }
  }
  if (!os) throw std::runtime_error("failed writing tensor dump");
}

void write_dump(std::ostream& os, const Tensor& t) { write_dump(os, t, precision()); }

Tensor read_dump(std::istream& is) {
  std::array<char, 4> magic{};
  is.read(magic.data(), magic.size());
  if (!is || magic != kMagic) throw std::runtime_error("not a tensor dump (bad magic)");
  const auto version = get_word<std::uint32_t>(is);
  if (version != kDumpVersion) throw std::runtime_error("unsupported dump version " + std::to_string(version));
  const auto dtype = get_word<std::uint32_t>(is);
  if (dtype > 1) throw std::runtime_error("unknown dump dtype " + std::to_string(dtype));
  const auto ndim = get_word<std::uint32_t>(is);
  if (ndim == 0 || ndim > 8) throw std::runtime_error("bad dump rank " + std::to_string(ndim));
  Shape dims(ndim);
  for (auto& d : dims) d = get_word<std::uint32_t>(is);
  check_dims(dims);
  std::vector<double> values(product(dims));
  for (auto& v : values) {
    v = dtype == 0 ? static_cast<double>(std::bit_cast<float>(get_word<std::uint32_t>(is)))
                   : std::bit_cast<double>(get_word<std::uint64_t>(is));
  }
  return Tensor(std::move(dims), std::move(values));
}

void save_dump(const std::string& path, const Tensor& t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  write_dump(os, t);
}

Tensor load_dump(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_dump(is);
}

}  // namespace fusionkd
