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

#include <map>
#include <random>
#include <string>
#include <vector>

#include "fusionkd/tensor.hpp"

namespace fusionkd {

struct ParamEntry {
  Tensor value;
  Tensor grad;
  bool trainable = true;
};

/// Named learnable tensors with gradient buffers, iterated in name order.
class ParamStore {
 public:
  void add(const std::string& name, Tensor value, bool trainable = true);

  bool contains(const std::string& name) const { return entries_.count(name) != 0; }
  const Tensor& value(const std::string& name) const;
  Tensor& mutable_value(const std::string& name);
  const Tensor& grad(const std::string& name) const;
  bool trainable(const std::string& name) const;

  /// Adds `g` into the gradient buffer of `name`.
  void accumulate(const std::string& name, const Tensor& g);
  void zero_grad();

  std::vector<std::string> names() const;
  std::vector<std::string> trainable_names() const;
  std::size_t size() const { return entries_.size(); }

  const std::map<std::string, ParamEntry>& entries() const { return entries_; }
  std::map<std::string, ParamEntry>& entries() { return entries_; }

 private:
  const ParamEntry& entry(const std::string& name) const;
  ParamEntry& entry(const std::string& name);

  std::map<std::string, ParamEntry> entries_;
};

/// Seeded initializers shared by every module.
Tensor random_normal(const Shape& dims, double stddev, std::mt19937_64& rng);
Tensor random_uniform(const Shape& dims, double lo, double hi, std::mt19937_64& rng);

// Registers `<prefix>.w` [c_out,c_in,k,k] ~ N(0, gain^2 / fan_in) and a small
// nonzero `<prefix>.b`.
void add_conv(ParamStore& store, const std::string& prefix, std::size_t c_out, std::size_t c_in,
              std::size_t k, std::mt19937_64& rng, bool trainable = true, double gain = 1.0);

// Registers `<prefix>.w` [k_in,m_out] and `<prefix>.b` [m_out].
void add_affine(ParamStore& store, const std::string& prefix, std::size_t k_in, std::size_t m_out,
                std::mt19937_64& rng, bool trainable = true, double gain = 1.0);

}  // namespace fusionkd
