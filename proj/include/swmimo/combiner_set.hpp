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

#include <optional>
#include <utility>

#include "swmimo/errors.hpp"
#include "swmimo/types.hpp"

namespace swmimo {

/// Per-user combining vectors, optionally split into an RF stage and a
/// baseband stage. Metric code only ever reads `composite()`.
template <typename Real>
class CombinerSet {
 public:
  CombinerSet() = default;

  /// RF-only combining; composite equals `rf`.
  explicit CombinerSet(CMatrix<Real> rf) : rf_(std::move(rf)), composite_(rf_) {}

  /// RF stage (N x K) followed by a baseband stage (K x U).
  CombinerSet(CMatrix<Real> rf, CMatrix<Real> baseband) : rf_(std::move(rf)) {
    if (rf_.cols() != baseband.rows())
      throw InvalidCombiner("baseband rows must match the number of RF outputs");
    composite_ = rf_ * baseband;
    baseband_ = std::move(baseband);
  }

  const CMatrix<Real>& rf() const { return rf_; }
  const std::optional<CMatrix<Real>>& baseband() const { return baseband_; }
  const CMatrix<Real>& composite() const { return composite_; }

  Index n_antennas() const { return composite_.rows(); }
  Index n_users() const { return composite_.cols(); }

  /// Composite vector of user u.
  auto vector(Index u) const { return composite_.col(u); }

 private:
  CMatrix<Real> rf_;
  std::optional<CMatrix<Real>> baseband_;
  CMatrix<Real> composite_;
};

using CombinerSetd = CombinerSet<double>;

enum class CombinerMode { MF, ZF };

inline const char* to_string(CombinerMode mode) { return mode == CombinerMode::MF ? "MF" : "ZF"; }

}  // namespace swmimo
