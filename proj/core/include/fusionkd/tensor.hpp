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

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fusionkd {

using Shape = std::vector<std::size_t>;

/// Storage precision applied to every operation output.
///
/// Values are always computed in double. Under `f32` each produced tensor is
/// rounded through float, so stored values are exactly those a 32-bit run
/// would hold. Oracle and gradient suites run under `f64`.
enum class Precision : std::uint32_t { f32 = 0, f64 = 1 };

Precision precision();
void set_precision(Precision p);

/// Restores the previous global precision on scope exit.
class PrecisionScope {
 public:
  explicit PrecisionScope(Precision p) : saved_(precision()) { set_precision(p); }
  ~PrecisionScope() { set_precision(saved_); }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  Precision saved_;
};

/// Raised when an operation produces NaN or Inf.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a documented invariant of an input is violated.
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string shape_str(const Shape& dims);

/// Dense row-major real array.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape dims, double fill = 0.0);
  Tensor(Shape dims, std::vector<double> values);

  static Tensor scalar(double v) { return Tensor({1}, v); }

  const Shape& dims() const { return dims_; }
  std::size_t ndim() const { return dims_.size(); }
  std::size_t dim(std::size_t axis) const { return dims_.at(axis); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  template <typename... Idx>
  double& at(Idx... idx) {
    return data_[offset({static_cast<std::size_t>(idx)...})];
  }
  template <typename... Idx>
  double at(Idx... idx) const {
    return data_[offset({static_cast<std::size_t>(idx)...})];
  }

  std::size_t offset(std::initializer_list<std::size_t> idx) const;

  /// Rounds to the global precision and rejects non-finite values.
  Tensor& finalize();

  bool same_dims(const Tensor& other) const { return dims_ == other.dims_; }
  Tensor reshaped(Shape dims) const;

  void fill(double v);
  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);
  Tensor& operator*=(double s);

  double sum() const;
  double max_abs() const;

  friend bool operator==(const Tensor& a, const Tensor& b) {
    return a.dims_ == b.dims_ && a.data_ == b.data_;
  }

 private:
  Shape dims_;
  std::vector<double> data_;
};

Tensor operator+(Tensor a, const Tensor& b);
Tensor operator-(Tensor a, const Tensor& b);
Tensor operator*(Tensor a, double s);

double max_abs_diff(const Tensor& a, const Tensor& b);

/// Rounds a scalar to the global precision; throws NumericError if not finite.
double finalize_scalar(double v);

void require(bool cond, const std::string& msg);

// Tensor dump format: "IMKD", u32 version = 1, u32 dtype (0 = f32, 1 = f64),
// u32 ndim, ndim x u32 dims, row-major little-endian payload.
void write_dump(std::ostream& os, const Tensor& t, Precision dtype);
void write_dump(std::ostream& os, const Tensor& t);
Tensor read_dump(std::istream& is);
void save_dump(const std::string& path, const Tensor& t);
Tensor load_dump(const std::string& path);

}  // namespace fusionkd
