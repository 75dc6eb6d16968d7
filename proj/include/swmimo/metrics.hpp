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
#include <limits>
#include <vector>

#include "swmimo/channel.hpp"
#include "swmimo/combiner_set.hpp"
#include "swmimo/errors.hpp"
#include "swmimo/types.hpp"

namespace swmimo {

/// SINR, rate and sum rate of one channel realization.
template <typename Real>
struct LinkMetrics {
  RVector<Real> per_user_sinr;
  RVector<Real> per_user_rate;  // bits/s/Hz
  Real sum_rate = 0;
};

/// The three per-user quantities the SINR depends on, independent of the
/// operating SNR:
///   SINR_u = rho * signal_u / (rho * interference_u + noise_gain_u).
template <typename Real>
struct PowerTerms {
  RVector<Real> signal;        // |w_u^* h_u|^2
  RVector<Real> interference;  // sum_{l != u} |w_u^* h_l|^2
  RVector<Real> noise_gain;    // ||w_u||^2

  Index size() const { return signal.size(); }
};

template <typename Real>
PowerTerms<Real> power_terms(const CMatrix<Real>& h, const CMatrix<Real>& combiners) {
  if (combiners.rows() != h.rows() || combiners.cols() != h.cols())
    throw InvalidCombiner("combiner shape " + std::to_string(combiners.rows()) + "x" +
                          std::to_string(combiners.cols()) + " does not match channel " +
                          std::to_string(h.rows()) + "x" + std::to_string(h.cols()));
  const Index users = h.cols();
  const CMatrix<Real> g = combiners.adjoint() * h;  // g(u, l) = w_u^* h_l
  PowerTerms<Real> t;
  t.signal.resize(users);
  t.interference.resize(users);
  t.noise_gain = combiners.colwise().squaredNorm().transpose();
  for (Index u = 0; u < users; ++u) {
    if (!(t.noise_gain(u) > Real(0)))
      throw InvalidCombiner("combiner of user " + std::to_string(u) + " is zero");
    t.signal(u) = std::norm(g(u, u));
    Real interference = 0;
    for (Index l = 0; l < users; ++l)
      if (l != u) interference += std::norm(g(u, l));
    t.interference(u) = interference;
  }
  return t;
}

template <typename Real>
LinkMetrics<Real> metrics_from_terms(const PowerTerms<Real>& t, Real rho) {
  if (!(rho >= Real(0))) throw InvalidParameter("snr rho must be >= 0");
  LinkMetrics<Real> m;
  const Index users = t.size();
  m.per_user_sinr.resize(users);
  m.per_user_rate.resize(users);
  for (Index u = 0; u < users; ++u) {
    const Real sinr = rho * t.signal(u) / (rho * t.interference(u) + t.noise_gain(u));
    m.per_user_sinr(u) = sinr;
    m.per_user_rate(u) = std::log2(Real(1) + sinr);
  }
  m.sum_rate = m.per_user_rate.sum();
  return m;
}

/// Analytic per-user SINR of linear combining with unit-power symbols.
template <typename Real>
LinkMetrics<Real> sinr(const ChannelMatrix<Real>& h, const CombinerSet<Real>& combiners, Real rho) {
  return metrics_from_terms(power_terms(h.matrix(), combiners.composite()), rho);
}

/// SINR estimated from transmission samples with a genie that knows the
/// transmitted symbols.
///
/// For each user the combiner output y_u = w_u^* r is regressed on the known
/// symbol vector; regression coefficients give desired and interference
/// amplitudes and the residual gives the noise power. An estimate whose
/// residual is at round-off level is reported as +infinity.
template <typename Real>
LinkMetrics<Real> empirical_sinr(const std::vector<TransmissionSample<Real>>& samples,
                                 const CombinerSet<Real>& combiners) {
  constexpr std::size_t kMinSamples = 100;
  if (samples.size() < kMinSamples)
    throw InsufficientData("empirical SINR needs at least 100 samples, got " +
                           std::to_string(samples.size()));
  const CMatrix<Real>& w = combiners.composite();
  const Index users = w.cols();
  if (samples.front().symbols.size() != users || samples.front().received.size() != w.rows())
    throw InvalidCombiner("combiner shape does not match transmission samples");

  CMatrix<Real> shs = CMatrix<Real>::Zero(users, users);
  CMatrix<Real> shy = CMatrix<Real>::Zero(users, users);
  RVector<Real> symbol_power = RVector<Real>::Zero(users);
  for (const auto& k : samples) {
    const CVector<Real> y = w.adjoint() * k.received;
    shs.noalias() += k.symbols.conjugate() * k.symbols.transpose();
    shy.noalias() += k.symbols.conjugate() * y.transpose();
    symbol_power += k.symbols.cwiseAbs2();
  }
  const Real count = static_cast<Real>(samples.size());
  symbol_power /= count;
  // Column u holds the amplitudes user u's output sees from every symbol.
  const CMatrix<Real> gain = shs.ldlt().solve(shy);

  RVector<Real> residual = RVector<Real>::Zero(users);
  RVector<Real> output_power = RVector<Real>::Zero(users);
  for (const auto& k : samples) {
    const CVector<Real> y = w.adjoint() * k.received;
    const CVector<Real> fit = gain.transpose() * k.symbols;
    residual += (y - fit).cwiseAbs2();
    output_power += y.cwiseAbs2();
  }
  residual /= (count - static_cast<Real>(users));
  output_power /= count;

  LinkMetrics<Real> m;
  m.per_user_sinr.resize(users);
  m.per_user_rate.resize(users);
  for (Index u = 0; u < users; ++u) {
    const Real desired = std::norm(gain(u, u)) * symbol_power(u);
    Real interference = 0;
    for (Index l = 0; l < users; ++l)
      if (l != u) interference += std::norm(gain(l, u)) * symbol_power(l);
    const Real impairment = interference + residual(u);
    Real value;
    if (impairment <= Real(1e-24) * output_power(u))
      value = desired > Real(0) ? std::numeric_limits<Real>::infinity() : Real(0);
    else
      value = desired / impairment;
    m.per_user_sinr(u) = value;
    m.per_user_rate(u) = std::log2(Real(1) + value);
  }
  m.sum_rate = m.per_user_rate.sum();
  return m;
}

/// Single-user SNR of combiner w relative to maximum ratio combining on the
/// same channel; rho cancels.
template <typename Real, typename DerivedH, typename DerivedW>
Real snr_ratio(const Eigen::MatrixBase<DerivedH>& h, const Eigen::MatrixBase<DerivedW>& w) {
  const Real h_energy = h.squaredNorm();
  if (!(h_energy > Real(0))) throw InvalidParameter("snr_ratio: channel vector is zero");
  const Real w_energy = w.squaredNorm();
  if (!(w_energy > Real(0))) throw InvalidCombiner("snr_ratio: combiner vector is zero");
  return std::norm(w.dot(h)) / w_energy / h_energy;
}

}  // namespace swmimo
