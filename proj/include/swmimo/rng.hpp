// SPDX-License-Identifier: Apache-2.0
//
// swmimo - link-level simulator for switch-based massive MIMO receivers
// Copyright (C) 2026 The swmimo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace swmimo {

using Engine = std::mt19937_64;

/// Independent generator for one substream of a seeded run.
///
/// The engine state is a pure function of the seed and the stream path, so
/// work split over any number of threads reproduces the same draws as long
/// as each unit of work owns its path (for example {cell, trial}).
inline Engine substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
  std::vector<std::uint32_t> words;
  words.reserve(2 * (path.size() + 1) + 1);
  auto push = [&words](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  words.push_back(static_cast<std::uint32_t>(path.size()));
  for (auto p : path) push(p);
  std::seed_seq seq(words.begin(), words.end());
  return Engine(seq);
}

/// Circularly-symmetric complex Gaussian sampler with E|z|^2 = variance.
template <typename Real>
class ComplexNormal {
 public:
  explicit ComplexNormal(Real variance = Real(1))
      : normal_(Real(0), std::sqrt(variance / Real(2))) {}

  template <typename Gen>
  std::complex<Real> operator()(Gen& gen) {
    const Real re = normal_(gen);
    const Real im = normal_(gen);
    return {re, im};
  }

 private:
  std::normal_distribution<Real> normal_;
};

}  // namespace swmimo
