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

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace swmimo::stats {

/// Pairwise (cascade) sum; result depends only on the order of `values`.
inline double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0;
    for (double v : values) s += v;
    return s;
  }
  const auto half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

struct MeanCi {
  double mean = 0;
  double variance = 0;  // unbiased sample variance
  double ci95 = 0;      // normal-approximation half width
};

inline MeanCi mean_ci(std::span<const double> values) {
  MeanCi out;
  const auto n = values.size();
  if (n == 0) return out;
  out.mean = pairwise_sum(values) / static_cast<double>(n);
  if (n < 2) return out;
  std::vector<double> dev(n);
  for (std::size_t i = 0; i < n; ++i) dev[i] = (values[i] - out.mean) * (values[i] - out.mean);
  out.variance = pairwise_sum(dev) / static_cast<double>(n - 1);
  out.ci95 = 1.959963984540054 * std::sqrt(out.variance / static_cast<double>(n));
  return out;
}

/// Kolmogorov survival function Q(lambda) = 2 sum_k (-1)^(k-1) exp(-2 k^2 lambda^2).
inline double kolmogorov_q(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

inline double ks_effective_sqrt_n(std::size_t n) {
  const double rn = std::sqrt(static_cast<double>(n));
  return rn + 0.12 + 0.11 / rn;
}

struct KsResult {
  double statistic = 0;
  double p_value = 1;
  double critical_1pct = 0;
};

/// One-sample Kolmogorov-Smirnov test of `samples` against `cdf`.
inline KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  KsResult r;
  const auto n = samples.size();
  if (n == 0) return r;
  std::sort(samples.begin(), samples.end());
  double d = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / static_cast<double>(n) - f,
                  f - static_cast<double>(i) / static_cast<double>(n)});
  }
  const double en = ks_effective_sqrt_n(n);
  r.statistic = d;
  r.p_value = kolmogorov_q(en * d);
  // Q(lambda) = 0.01 by bisection.
  double lo = 0.5, hi = 3.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (kolmogorov_q(mid) > 0.01 ? lo : hi) = mid;
  }
  r.critical_1pct = 0.5 * (lo + hi) / en;
  return r;
}

}  // namespace swmimo::stats
