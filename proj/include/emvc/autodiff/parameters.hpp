// Copyright 2026 The emvc Authors
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

#ifndef EMVC__AUTODIFF__PARAMETERS_HPP_
#define EMVC__AUTODIFF__PARAMETERS_HPP_

#include <cstddef>
#include <deque>
#include <map>
#include <string>
#include <string_view>
#include <utility>

#include "emvc/autodiff/tensor.hpp"
#include "emvc/common/error.hpp"

namespace emvc::autodiff
{

// Named trainable tensors in insertion order. Addresses are stable for the
// lifetime of the store, so graphs may hold pointers into it.
template <typename Real>
class ParameterStore
{
public:
  struct Entry
  {
    std::string name;
    Tensor<Real> tensor;
  };

  Tensor<Real> & add(std::string name, Shape dims)
  {
    if (index_.count(name)) {
      throw ValueError("duplicate parameter `" + name + "`");
    }
    index_.emplace(name, entries_.size());
    entries_.push_back(Entry{std::move(name), Tensor<Real>(std::move(dims))});
    entries_.back().tensor.enable_grad();
    return entries_.back().tensor;
  }

  bool contains(std::string_view name) const { return index_.find(name) != index_.end(); }

  Tensor<Real> & at(std::string_view name) { return entries_[lookup(name)].tensor; }
  const Tensor<Real> & at(std::string_view name) const { return entries_[lookup(name)].tensor; }

  std::size_t size() const { return entries_.size(); }

  std::size_t total_elements() const
  {
    std::size_t n = 0;
    for (const auto & e : entries_) {
      n += e.tensor.size();
    }
    return n;
  }

  void zero_grad()
  {
    for (auto & e : entries_) {
      e.tensor.zero_grad();
    }
  }

  auto begin() { return entries_.begin(); }
  auto end() { return entries_.end(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

private:
  std::size_t lookup(std::string_view name) const
  {
    const auto it = index_.find(name);
    if (it == index_.end()) {
      throw ValueError("unknown parameter `" + std::string(name) + "`");
    }
    return it->second;
  }

  std::deque<Entry> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

}  // namespace emvc::autodiff

#endif  // EMVC__AUTODIFF__PARAMETERS_HPP_
