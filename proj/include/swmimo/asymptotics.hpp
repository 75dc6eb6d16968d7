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
#include <cstdint>
#include <string>
#include <vector>

#include "swmimo/channel.hpp"
#include "swmimo/errors.hpp"
#include "swmimo/rng.hpp"
#include "swmimo/types.hpp"

namespace swmimo {

/// Fraction of the matched-filter SNR that quasi-coherent switch combining
/// with NQ shifters retains as N grows: NQ^2/(4 pi) sin^2(pi/NQ).
///
/// Ranges from 0 (NQ = 1) up to pi/4 (NQ -> infinity, equal-gain combining).
template <typename Real = double>
Real gamma_factor(Index n_quant) {
  if (n_quant < 1) throw InvalidParameter("gamma_factor: n_quant must be >= 1");
  const Real nq = static_cast<Real>(n_quant);
  const Real s = std::sin(kPi<Real> / nq);
  return nq * nq / (Real(4) * kPi<Real>) * s * s;
}

namespace detail {
inline void check_dims(Index n_antennas, Index n_users) {
  if (n_users < 1 || n_antennas < n_users)
    throw InvalidParameter("asymptotic limit needs N >= U >= 1 (got N=" +
                           std::to_string(n_antennas) + ", U=" + std::to_string(n_users) + ")");
}
}  // namespace detail

/// Large-system SINR of switch combining: (N/U) * gamma(NQ).
template <typename Real = double>
Real sinr_limit(Index n_antennas, Index n_users, Index n_quant) {
  detail::check_dims(n_antennas, n_users);
  return static_cast<Real>(n_antennas) / static_cast<Real>(n_users) * gamma_factor<Real>(n_quant);
}

/// log2(1 + sinr_limit).
template <typename Real = double>
Real rate_limit(Index n_antennas, Index n_users, Index n_quant) {
  return std::log2(Real(1) + sinr_limit<Real>(n_antennas, n_users, n_quant));
}

template <typename Real = double>
struct AsymptoticPrediction {
  Index n_antennas = 0;
  Index n_users = 0;
  Index n_quant = 0;
  Real gamma = 0;
  Real sinr_limit = 0;
  Real rate_limit = 0;
};

template <typename Real = double>
AsymptoticPrediction<Real> predict(Index n_antennas, Index n_users, Index n_quant) {
  AsymptoticPrediction<Real> p;
  p.n_antennas = n_antennas;
  p.n_users = n_users;
  p.n_quant = n_quant;
  p.gamma = gamma_factor<Real>(n_quant);
  p.sinr_limit = sinr_limit<Real>(n_antennas, n_users, n_quant);
  p.rate_limit = rate_limit<Real>(n_antennas, n_users, n_quant);
  return p;
}

struct IdentityCheck {
  double lhs = 0;  // NQ^2/(16 pi) (sin^2(2pi/NQ) + (1 - cos(2pi/NQ))^2)
  double rhs = 0;  // NQ^2/(4 pi) sin^2(pi/NQ)
  double abs_diff = 0;
};

/// Evaluates the two sides of the half-angle step that turns the per-sector
/// expectations into the closed-form gamma factor.
inline IdentityCheck appendix_identity_check(Index n_quant) {
  if (n_quant < 1) throw InvalidParameter("appendix_identity_check: n_quant must be >= 1");
  const double nq = static_cast<double>(n_quant);
  const double x = kTwoPi<double> / nq;
  const double one_minus_cos = 2.0 * std::sin(x / 2) * std::sin(x / 2);
  const double lhs = nq * nq / (16.0 * kPi<double>) *
                     (std::sin(x) * std::sin(x) + one_minus_cos * one_minus_cos);
  const double rhs = gamma_factor<double>(n_quant);
  return {lhs, rhs, std::abs(lhs - rhs)};
}

/// One Monte Carlo estimate against its closed form.
struct ExpectationEstimate {
  std::string name;
  double estimate = 0;
  double target = 0;
  double std_error = 0;
  double z_score = 0;
};

struct SectorExpectationReport {
  Index n_quant = 0;
  std::size_t n_samples = 0;
  std::vector<ExpectationEstimate> entries;

  double max_abs_z() const {
    double m = 0;
    for (const auto& e : entries) m = std::max(m, std::abs(e.z_score));
    return m;
  }
};

/// Monte Carlo check of the per-sector expectations behind the gamma factor.
///
/// Draws h ~ CN(0,1) and folds its phase into the first sector, which is what
/// quasi-coherent combining does to every entry; the folded phase is then
/// U(0, 2pi/NQ) and independent of |h|. Estimates E|h|, E[cos], E[sin],
/// E[|h| cos], E[|h| sin], and the factorisation residual
/// E[|h| cos] - E|h| E[cos] (target 0).
inline SectorExpectationReport sector_expectation_check(Index n_quant, std::size_t n_samples,
                                                        std::uint64_t seed) {
  if (n_quant < 1) throw InvalidParameter("sector_expectation_check: n_quant must be >= 1");
  if (n_samples < 10000)
    throw InsufficientData("sector_expectation_check needs at least 10^4 samples, got " +
                           std::to_string(n_samples));

  const double width = kTwoPi<double> / static_cast<double>(n_quant);
  auto gen = substream(seed, {0x5ec7ULL, static_cast<std::uint64_t>(n_quant)});
  ComplexNormal<double> cn;

  std::vector<double> mag(n_samples), c(n_samples), s(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    const auto h = cn(gen);
    const double theta = std::fmod(entry_angle(h), width);
    mag[k] = std::abs(h);
    c[k] = std::cos(theta);
    s[k] = std::sin(theta);
  }

  auto mean_and_se = [n_samples](auto&& f) {
    double sum = 0, sum2 = 0;
    for (std::size_t k = 0; k < n_samples; ++k) {
      const double v = f(k);
      sum += v;
      sum2 += v * v;
    }
    const double n = static_cast<double>(n_samples);
    const double mean = sum / n;
    const double var = std::max(0.0, (sum2 - n * mean * mean) / (n - 1));
    return std::pair<double, double>{mean, std::sqrt(var / n)};
  };

  const double mag_mean = std::sqrt(kPi<double>) / 2;
  const double ecos = width > 0 ? std::sin(width) / width : 1.0;
  const double esin = (1 - std::cos(width)) / width;

  SectorExpectationReport rep;
  rep.n_quant = n_quant;
  rep.n_samples = n_samples;
  auto add = [&rep](std::string name, std::pair<double, double> est, double target) {
    const double z = est.second > 0 ? (est.first - target) / est.second : 0.0;
    rep.entries.push_back({std::move(name), est.first, target, est.second, z});
  };
  const auto e_mag = mean_and_se([&](std::size_t k) { return mag[k]; });
  const auto e_cos = mean_and_se([&](std::size_t k) { return c[k]; });
  add("E|h|", e_mag, mag_mean);
  add("E[cos]", e_cos, ecos);
  add("E[sin]", mean_and_se([&](std::size_t k) { return s[k]; }), esin);
  add("E[|h|cos]", mean_and_se([&](std::size_t k) { return mag[k] * c[k]; }), mag_mean * ecos);
  add("E[|h|sin]", mean_and_se([&](std::size_t k) { return mag[k] * s[k]; }), mag_mean * esin);
  // Centred product: its mean is the covariance of |h| and cos, zero under
  // independence.
  add("cov(|h|,cos)", mean_and_se([&](std::size_t k) {
        return (mag[k] - e_mag.first) * (c[k] - e_cos.first);
      }),
      0.0);
  return rep;
}

}  // namespace swmimo
