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

#include "fusionkd/param_store.hpp"

#include <cmath>
#include <stdexcept>

namespace fusionkd {

void ParamStore::add(const std::string& name, Tensor value, bool trainable) {
  if (entries_.count(name)) throw std::invalid_argument("duplicate parameter name: " + name);
  Tensor grad(value.dims(), 0.0);
  entries_.emplace(name, ParamEntry{std::move(value.finalize()), std::move(grad), trainable});
}

const ParamEntry& ParamStore::entry(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw std::invalid_argument("unknown parameter: " + name);
  return it->second;
}

ParamEntry& ParamStore::entry(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw std::invalid_argument("unknown parameter: " + name);
  return it->second;
}

const Tensor& ParamStore::value(const std::string& name) const { return entry(name).value; }
Tensor& ParamStore::mutable_value(const std::string& name) { return entry(name).value; }
const Tensor& ParamStore::grad(const std::string& name) const { return entry(name).grad; }
bool ParamStore::trainable(const std::string& name) const { return entry(name).trainable; }

void ParamStore::accumulate(const std::string& name, const Tensor& g) {
  auto& e = entry(name);
  if (!e.grad.same_dims(g)) {
    throw std::invalid_argument("gradient dims " + shape_str(g.dims()) + " do not match parameter " + name +
                                " " + shape_str(e.grad.dims()));
  }
  e.grad += g;
}

void ParamStore::zero_grad() {
  for (auto& [name, e] : entries_) e.grad.fill(0.0);
}

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [name, e] : entries_) out.push_back(name);
  return out;
}

std::vector<std::string> ParamStore::trainable_names() const {
  std::vector<std::string> out;
  for (const auto& [name, e] : entries_) {
    if (e.trainable) out.push_back(name);
  }
  return out;
}

Tensor random_normal(const Shape& dims, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Tensor t(dims);
  for (auto& v : t.data()) v = dist(rng);
  return t;
}

Tensor random_uniform(const Shape& dims, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Tensor t(dims);
  for (auto& v : t.data()) v = dist(rng);
  return t;
}

void add_conv(ParamStore& store, const std::string& prefix, std::size_t c_out, std::size_t c_in,
              std::size_t k, std::mt19937_64& rng, bool trainable, double gain) {
  const double fan_in = static_cast<double>(c_in * k * k);
  store.add(prefix + ".w", random_normal({c_out, c_in, k, k}, gain / std::sqrt(fan_in), rng), trainable);
  store.add(prefix + ".b", random_uniform({c_out}, -0.05, 0.05, rng), trainable);
}

void add_affine(ParamStore& store, const std::string& prefix, std::size_t k_in, std::size_t m_out,
                std::mt19937_64& rng, bool trainable, double gain) {
  const double fan_in = static_cast<double>(k_in);
  store.add(prefix + ".w", random_normal({k_in, m_out}, gain / std::sqrt(fan_in), rng), trainable);
  store.add(prefix + ".b", random_uniform({m_out}, -0.05, 0.05, rng), trainable);
}

}  // namespace fusionkd
