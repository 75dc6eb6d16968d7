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

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace swmimo {

namespace detail {

inline std::string short_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace detail

/// A parameter is outside its documented domain.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A combiner vector is zero or has the wrong shape for the channel.
class InvalidCombiner : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An estimator was given fewer samples than it needs.
class InsufficientData : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// An exhaustive search would exceed its evaluation budget.
class SearchTooLarge : public std::runtime_error {
 public:
  SearchTooLarge(const std::string& what_search, double required, double budget)
      : std::runtime_error(what_search + " needs " + detail::short_number(required) +
                           " evaluations, budget is " + detail::short_number(budget)),
        required_(required),
        budget_(budget) {}

  double required() const noexcept { return required_; }
  double budget() const noexcept { return budget_; }

 private:
  double required_;
  double budget_;
};

/// The effective channel handed to zero forcing is singular or too
/// ill-conditioned to invert.
class RankDeficient : public std::runtime_error {
 public:
  RankDeficient(const std::string& msg, double condition)
      : std::runtime_error(msg), condition_(condition) {}

  double condition() const noexcept { return condition_; }

 private:
  double condition_;
};

}  // namespace swmimo
