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

#include "swmimo/errors.hpp"
#include "swmimo/rng.hpp"
#include "swmimo/types.hpp"

namespace swmimo {

/// Dimensions and operating point of an uplink link.
struct SystemConfig {
  Index n_antennas = 64;
  Index n_users = 3;
  Index n_quant_phases = 4;
  Index n_rf_chains = 3;
  double snr_linear = 1.0;  // P / sigma^2
  std::uint64_t rng_seed = 0;

  void validate() const {
    if (n_users < 1) throw InvalidParameter("n_users must be >= 1");
    if (n_antennas < n_users) throw InvalidParameter("n_antennas must be >= n_users");
    if (n_rf_chains < n_users) throw InvalidParameter("n_rf_chains must be >= n_users");
    if (n_quant_phases < 1) throw InvalidParameter("n_quant_phases must be >= 1");
    if (!(snr_linear >= 0.0)) throw InvalidParameter("snr_linear must be >= 0");
  }
};

/// Angle of a complex channel entry mapped to [0, 2*pi). A zero entry has
/// angle 0.
template <typename Real>
Real entry_angle(const Complex<Real>& h) {
  if (h == Complex<Real>(0)) return Real(0);
  Real a = std::atan2(h.imag(), h.real());
  if (a < Real(0)) {
    a += kTwoPi<Real>;
    // -tiny + 2*pi can round up to exactly 2*pi.
    if (a >= kTwoPi<Real>) a = Real(0);
  }
  return a;
}

/// N x U narrowband channel, one column per user.
template <typename Real>
class ChannelMatrix {
 public:
  ChannelMatrix() = default;
  explicit ChannelMatrix(CMatrix<Real> entries) : h_(std::move(entries)) {}

  Index n_antennas() const { return h_.rows(); }
  Index n_users() const { return h_.cols(); }
  bool empty() const { return h_.size() == 0; }

  const CMatrix<Real>& matrix() const { return h_; }
  auto column(Index u) const { return h_.col(u); }
  const Complex<Real>& operator()(Index n, Index u) const { return h_(n, u); }

  /// theta_{u,n} in [0, 2*pi).
  Real angle(Index n, Index u) const { return entry_angle(h_(n, u)); }

  /// Frobenius norm.
  Real norm() const { return h_.norm(); }

 private:
  CMatrix<Real> h_;
};

using ChannelMatrixd = ChannelMatrix<double>;

/// Draws an IID CN(0,1) channel from a caller-owned generator.
template <typename Real = double, typename Gen>
ChannelMatrix<Real> generate_iid(Index n_antennas, Index n_users, Gen& gen) {
  ComplexNormal<Real> cn;
  CMatrix<Real> h(n_antennas, n_users);
  // Column-major fill: user u's vector is a contiguous run of draws.
  for (Index u = 0; u < n_users; ++u)
    for (Index n = 0; n < n_antennas; ++n) h(n, u) = cn(gen);
  return ChannelMatrix<Real>(std::move(h));
}

/// Draws an IID CN(0,1) channel. Deterministic in (config.rng_seed, stream).
template <typename Real = double>
ChannelMatrix<Real> generate_iid(const SystemConfig& config, std::uint64_t stream) {
  config.validate();
  auto gen = substream(config.rng_seed, {stream});
  return generate_iid<Real>(config.n_antennas, config.n_users, gen);
}

/// One use of the uplink: r = sqrt(P) H s + n.
template <typename Real>
struct TransmissionSample {
  CVector<Real> symbols;
  CVector<Real> noise;
  CVector<Real> received;
};

/// Draws Gaussian unit-power symbols and CN(0, sigma2 I) noise, and forms the
/// received vectors.
template <typename Real>
std::vector<TransmissionSample<Real>> simulate_transmission(const ChannelMatrix<Real>& h,
                                                            Real power, Real noise_variance,
                                                            std::size_t n_samples,
                                                            std::uint64_t seed) {
  if (!(power >= Real(0))) throw InvalidParameter("transmit power P must be >= 0");
  if (!(noise_variance > Real(0)))
    throw InvalidParameter("noise variance sigma^2 must be > 0");

  auto gen = substream(seed, {0x7478ULL});
  ComplexNormal<Real> sym_dist(Real(1));
  ComplexNormal<Real> noise_dist(noise_variance);
  const Real amplitude = std::sqrt(power);

  std::vector<TransmissionSample<Real>> out;
  out.reserve(n_samples);
  for (std::size_t k = 0; k < n_samples; ++k) {
    TransmissionSample<Real> s;
    s.symbols.resize(h.n_users());
    s.noise.resize(h.n_antennas());
    for (Index u = 0; u < h.n_users(); ++u) s.symbols(u) = sym_dist(gen);
    for (Index n = 0; n < h.n_antennas(); ++n) s.noise(n) = noise_dist(gen);
    s.received = amplitude * (h.matrix() * s.symbols) + s.noise;
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace swmimo
