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
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swmimo/channel.hpp"
#include "swmimo/combiner_set.hpp"
#include "swmimo/errors.hpp"
#include "swmimo/metrics.hpp"
#include "swmimo/types.hpp"

namespace swmimo {

// Sector and shifter indices are zero-based throughout: sector q covers
// phases [q*2*pi/NQ, (q+1)*2*pi/NQ) and shifter q is exp(-j*q*2*pi/NQ).

/// The bank of N_Q constant phase shifters on one RF chain.
template <typename Real>
class PhaseBank {
 public:
  explicit PhaseBank(Index n_quant) : n_quant_(n_quant) {
    if (n_quant < 1) throw InvalidParameter("phase bank needs n_quant >= 1");
    width_ = kTwoPi<Real> / static_cast<Real>(n_quant);
    shifters_.resize(n_quant);
    midpoints_.resize(n_quant);
    for (Index q = 0; q < n_quant; ++q) {
      shifters_(q) = std::polar(Real(1), -static_cast<Real>(q) * width_);
      midpoints_(q) = (Real(2 * q + 1)) * kPi<Real> / static_cast<Real>(n_quant);
    }
    shifters_(0) = Complex<Real>(1);
  }

  Index size() const { return n_quant_; }
  Real sector_width() const { return width_; }
  const CVector<Real>& shifters() const { return shifters_; }
  const Complex<Real>& shifter(Index q) const { return shifters_(q); }
  const RVector<Real>& midpoints() const { return midpoints_; }

 private:
  Index n_quant_;
  Real width_;
  CVector<Real> shifters_;
  RVector<Real> midpoints_;
};

using PhaseBankd = PhaseBank<double>;

/// Sector holding `angle`, i.e. floor(angle / (2*pi/NQ)). This is the nearest
/// sector midpoint; an angle on a sector boundary goes to the upper sector.
template <typename Real>
Index assign_sector(Real angle, const PhaseBank<Real>& bank) {
  if (!(angle >= Real(0) && angle < kTwoPi<Real>))
    throw InvalidParameter("assign_sector: angle " + std::to_string(angle) +
                           " is outside [0, 2*pi)");
  const Real t = angle / bank.sector_width();
  auto q = static_cast<Index>(std::floor(t));
  // Boundaries such as 3*pi/2 are not representable; treat a value within a
  // few ulps below a boundary as on it.
  const Real tol = Real(16) * std::numeric_limits<Real>::epsilon() * std::max(Real(1), t);
  if (static_cast<Real>(q + 1) - t <= tol) ++q;
  return std::min(q, bank.size() - 1);
}

/// One-hot switch setting of one RF chain: antenna n feeds shifter sector(n).
class SwitchingMatrix {
 public:
  SwitchingMatrix(std::vector<Index> sectors, Index n_quant)
      : sectors_(std::move(sectors)), n_quant_(n_quant) {
    if (n_quant < 1) throw InvalidParameter("switching matrix needs n_quant >= 1");
    for (Index q : sectors_)
      if (q < 0 || q >= n_quant)
        throw InvalidParameter("switch assignment " + std::to_string(q) + " out of range");
  }

  Index n_antennas() const { return static_cast<Index>(sectors_.size()); }
  Index n_quant() const { return n_quant_; }
  Index sector(Index n) const { return sectors_[static_cast<std::size_t>(n)]; }
  const std::vector<Index>& sectors() const { return sectors_; }

  /// Dense N x NQ binary form.
  Eigen::MatrixXi one_hot() const {
    Eigen::MatrixXi s = Eigen::MatrixXi::Zero(n_antennas(), n_quant_);
    for (Index n = 0; n < n_antennas(); ++n) s(n, sector(n)) = 1;
    return s;
  }

  /// Antennas connected to each shifter; disjoint and covering 0..N-1.
  std::vector<std::vector<Index>> partition() const {
    std::vector<std::vector<Index>> sets(static_cast<std::size_t>(n_quant_));
    for (Index n = 0; n < n_antennas(); ++n)
      sets[static_cast<std::size_t>(sector(n))].push_back(n);
    return sets;
  }

  /// Combining vector realised by this setting. The receiver output w^* r
  /// multiplies antenna n by shifter p_{sector(n)}, so w = S conj(p).
  template <typename Real>
  CVector<Real> combiner(const PhaseBank<Real>& bank) const {
    if (bank.size() != n_quant_) throw InvalidParameter("phase bank size mismatch");
    CVector<Real> w(n_antennas());
    for (Index n = 0; n < n_antennas(); ++n) w(n) = std::conj(bank.shifter(sector(n)));
    return w;
  }

  bool operator==(const SwitchingMatrix&) const = default;

 private:
  std::vector<Index> sectors_;
  Index n_quant_;
};

/// Recovers the switch setting that realises w, or nullopt if some entry of w
/// is not a conjugated bank shifter (the hardware cannot produce it).
template <typename Real, typename Derived>
std::optional<SwitchingMatrix> switching_from_combiner(const Eigen::MatrixBase<Derived>& w,
                                                       const PhaseBank<Real>& bank,
                                                       Real tol = Real(1e-9)) {
  std::vector<Index> sectors(static_cast<std::size_t>(w.size()));
  for (Index n = 0; n < w.size(); ++n) {
    const Complex<Real> applied = std::conj(Complex<Real>(w(n)));
    Index match = -1;
    for (Index q = 0; q < bank.size(); ++q)
      if (std::abs(applied - bank.shifter(q)) <= tol) {
        match = q;
        break;
      }
    if (match < 0) return std::nullopt;
    sectors[static_cast<std::size_t>(n)] = match;
  }
  return SwitchingMatrix(std::move(sectors), bank.size());
}

template <typename Real>
struct SwitchCombiner {
  std::vector<SwitchingMatrix> switching;  // one per user
  CombinerSet<Real> combiners;
};

/// Quasi-coherent switch combining: each antenna is routed to the shifter
/// that rotates its channel entry into the first sector [0, 2*pi/NQ).
/// O(N*U).
template <typename Real>
SwitchCombiner<Real> quasi_coherent_switch_combiner(const ChannelMatrix<Real>& h,
                                                    const PhaseBank<Real>& bank) {
  if (h.empty()) throw InvalidParameter("quasi_coherent_switch_combiner: empty channel");
  const Index n_ant = h.n_antennas();
  const Index n_users = h.n_users();
  SwitchCombiner<Real> out;
  out.switching.reserve(static_cast<std::size_t>(n_users));
  CMatrix<Real> w(n_ant, n_users);
  for (Index u = 0; u < n_users; ++u) {
    std::vector<Index> sectors(static_cast<std::size_t>(n_ant));
    for (Index n = 0; n < n_ant; ++n) sectors[static_cast<std::size_t>(n)] = assign_sector(h.angle(n, u), bank);
    SwitchingMatrix s(std::move(sectors), bank.size());
    w.col(u) = s.combiner(bank);
    out.switching.push_back(std::move(s));
  }
  out.combiners = CombinerSet<Real>(std::move(w));
  return out;
}

template <typename Real>
struct ExhaustiveSwitchResult {
  std::vector<SwitchingMatrix> switching;
  CombinerSet<Real> combiners;
  Real sum_rate = 0;
  double evaluations = 0;
};

namespace detail {

// Relative slack for "strictly better"; keeps the lexicographically first
// candidate among numerically equal ones.
template <typename Real>
inline bool improves(Real candidate, Real best) {
  return candidate > best + Real(1e-12) * std::max(Real(1), std::abs(best));
}

inline double count_assignments(Index n_quant, Index digits) {
  return std::pow(static_cast<double>(n_quant), static_cast<double>(digits));
}

// Advances a base-`radix` odometer whose last digit varies fastest.
inline bool next_assignment(std::vector<Index>& digits, Index radix) {
  for (auto i = digits.size(); i-- > 0;) {
    if (++digits[i] < radix) return true;
    digits[i] = 0;
  }
  return false;
}

}  // namespace detail

/// Switch setting maximising |w^* h|^2 for one user by enumeration of all
/// NQ^N settings.
template <typename Real, typename Derived>
SwitchingMatrix exhaustive_switch_single_user(const Eigen::MatrixBase<Derived>& h,
                                              const PhaseBank<Real>& bank,
                                              double budget = 1e7) {
  const Index n_ant = h.size();
  const double needed = detail::count_assignments(bank.size(), n_ant);
  if (needed > budget) throw SearchTooLarge("single-user switch search", needed, budget);

  // rotated(n, q) = p_q h_n is antenna n's contribution when set to shifter q.
  CMatrix<Real> rotated(n_ant, bank.size());
  for (Index n = 0; n < n_ant; ++n)
    for (Index q = 0; q < bank.size(); ++q) rotated(n, q) = bank.shifter(q) * Complex<Real>(h(n));

  std::vector<Index> digits(static_cast<std::size_t>(n_ant), 0);
  std::vector<Index> best = digits;
  Real best_gain = -1;
  do {
    Complex<Real> acc(0);
    for (Index n = 0; n < n_ant; ++n) acc += rotated(n, digits[static_cast<std::size_t>(n)]);
    const Real gain = std::norm(acc);
    if (detail::improves(gain, best_gain)) {
      best_gain = gain;
      best = digits;
    }
  } while (detail::next_assignment(digits, bank.size()));
  return SwitchingMatrix(std::move(best), bank.size());
}

/// Sum-rate optimal switch settings for all users jointly, by enumerating all
/// NQ^(U*N) settings. Ties go to the lexicographically smallest assignment
/// (user 0's antennas first). Intended as an oracle for small instances.
template <typename Real>
ExhaustiveSwitchResult<Real> exhaustive_switch_combiner(const ChannelMatrix<Real>& h,
                                                        const PhaseBank<Real>& bank, Real rho,
                                                        double budget = 1e7) {
  if (h.empty()) throw InvalidParameter("exhaustive_switch_combiner: empty channel");
  if (!(rho >= Real(0))) throw InvalidParameter("snr rho must be >= 0");
  const Index n_ant = h.n_antennas();
  const Index n_users = h.n_users();
  const double needed = detail::count_assignments(bank.size(), n_ant * n_users);
  if (needed > budget) throw SearchTooLarge("switch combiner search", needed, budget);

  ExhaustiveSwitchResult<Real> out;
  out.evaluations = needed;

  if (n_users == 1 && rho > Real(0)) {
    // log2(1 + rho |w^*h|^2 / N) is increasing in |w^*h|^2.
    out.switching.push_back(exhaustive_switch_single_user(h.column(0), bank, budget));
    out.combiners = CombinerSet<Real>(CMatrix<Real>(out.switching[0].combiner(bank)));
    out.sum_rate = sinr(h, out.combiners, rho).sum_rate;
    return out;
  }

  std::vector<Index> digits(static_cast<std::size_t>(n_ant * n_users), 0);
  std::vector<Index> best = digits;
  Real best_rate = -1;
  CMatrix<Real> w(n_ant, n_users);
  do {
    for (Index u = 0; u < n_users; ++u)
      for (Index n = 0; n < n_ant; ++n)
        w(n, u) = std::conj(bank.shifter(digits[static_cast<std::size_t>(u * n_ant + n)]));
    const Real rate = metrics_from_terms(power_terms(h.matrix(), w), rho).sum_rate;
    if (detail::improves(rate, best_rate)) {
      best_rate = rate;
      best = digits;
    }
  } while (detail::next_assignment(digits, bank.size()));

  for (Index u = 0; u < n_users; ++u) {
    auto first = best.begin() + u * n_ant;
    out.switching.emplace_back(std::vector<Index>(first, first + n_ant), bank.size());
    w.col(u) = out.switching.back().combiner(bank);
  }
  out.combiners = CombinerSet<Real>(std::move(w));
  out.sum_rate = best_rate;
  return out;
}

/// Fully-digital matched filter, w_u = h_u.
template <typename Real>
CombinerSet<Real> mrc_combiner(const ChannelMatrix<Real>& h) {
  if (h.empty()) throw InvalidParameter("mrc_combiner: empty channel");
  return CombinerSet<Real>(h.matrix());
}

/// Continuous phase shifters (equal-gain combining), w_{u,n} = exp(j theta_{u,n}).
template <typename Real>
CombinerSet<Real> phase_shifter_combiner(const ChannelMatrix<Real>& h) {
  if (h.empty()) throw InvalidParameter("phase_shifter_combiner: empty channel");
  CMatrix<Real> w = h.matrix().unaryExpr([](const Complex<Real>& x) {
    const Real mag = std::abs(x);
    return mag > Real(0) ? Complex<Real>(x / mag) : Complex<Real>(1);
  });
  return CombinerSet<Real>(std::move(w));
}

/// Zero forcing in baseband on the effective channel G = W_RF^* H.
///
/// Uses F = G (G^* G)^{-1}, evaluated through a thin QR of G, so that
/// F^* G = I and the composite vectors null every other user.
template <typename Real>
CombinerSet<Real> zf_baseband(const ChannelMatrix<Real>& h, const CMatrix<Real>& rf,
                              Real max_condition = Real(1e10)) {
  if (rf.rows() != h.n_antennas())
    throw InvalidCombiner("zf_baseband: RF stage rows must equal the number of antennas");
  const CMatrix<Real> g = rf.adjoint() * h.matrix();
  const Index users = h.n_users();
  if (g.rows() < users)
    throw RankDeficient("zf_baseband: fewer RF outputs than users",
                        std::numeric_limits<double>::infinity());

  Eigen::JacobiSVD<CMatrix<Real>> svd(g);
  const auto& sv = svd.singularValues();
  const Real smax = sv(0);
  const Real smin = sv(sv.size() - 1);
  const double condition = smin > Real(0) ? double(smax / smin)
                                          : std::numeric_limits<double>::infinity();
  if (!(condition <= double(max_condition)))
    throw RankDeficient("zf_baseband: effective channel condition number " +
                            detail::short_number(condition) + " exceeds " +
                            detail::short_number(double(max_condition)),
                        condition);

  Eigen::HouseholderQR<CMatrix<Real>> qr(g);
  const CMatrix<Real> q_thin = qr.householderQ() * CMatrix<Real>::Identity(g.rows(), users);
  const CMatrix<Real> r = qr.matrixQR().topRows(users).template triangularView<Eigen::Upper>();
  // F = Q R^{-*}
  const CMatrix<Real> r_inv_adj = r.adjoint().template triangularView<Eigen::Lower>().solve(
      CMatrix<Real>::Identity(users, users));
  return CombinerSet<Real>(rf, q_thin * r_inv_adj);
}

/// Fully-digital zero forcing (W_RF = I).
template <typename Real>
CombinerSet<Real> zf_combiner(const ChannelMatrix<Real>& h, Real max_condition = Real(1e10)) {
  const CMatrix<Real> identity = CMatrix<Real>::Identity(h.n_antennas(), h.n_antennas());
  return zf_baseband(h, identity, max_condition);
}

template <typename Real>
struct AntennaSelection {
  std::vector<Index> antennas;  // ascending
  CombinerSet<Real> combiners;
  Real sum_rate = 0;
};

template <typename Real>
struct SelectionChoice {
  std::vector<Index> antennas;
  Real sum_rate = -1;
};

namespace detail {

inline double binomial(Index n, Index k) {
  double c = 1;
  for (Index i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(c);
}

inline bool next_combination(std::vector<Index>& idx, Index n) {
  const auto k = static_cast<Index>(idx.size());
  for (Index i = k - 1; i >= 0; --i) {
    auto& v = idx[static_cast<std::size_t>(i)];
    if (v < n - k + i) {
      ++v;
      for (Index j = i + 1; j < k; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace detail

/// Best U-antenna subset for each SNR in `rhos`.
///
/// Every subset is scored through its Gram matrix G_S = H_S^* H_S: matched
/// filtering gives signal G_uu^2, interference sum_{l!=u} |G_ul|^2 and noise
/// gain G_uu; zero forcing gives unit signal, no interference and noise gain
/// [G_S^{-1}]_uu. Subsets whose Gram matrix cannot be factored are skipped
/// under zero forcing. Ties go to the lexicographically smallest subset.
template <typename Real>
std::vector<SelectionChoice<Real>> antenna_selection_search(const ChannelMatrix<Real>& h,
                                                            std::span<const Real> rhos,
                                                            CombinerMode mode,
                                                            double budget = 1e6) {
  const Index n_ant = h.n_antennas();
  const Index users = h.n_users();
  if (h.empty() || users > n_ant) throw InvalidParameter("antenna_selection: need N >= U >= 1");
  for (Real rho : rhos)
    if (!(rho >= Real(0))) throw InvalidParameter("snr rho must be >= 0");
  const double needed = detail::binomial(n_ant, users);
  if (needed > budget) throw SearchTooLarge("antenna subset search", needed, budget);

  std::vector<CMatrix<Real>> outer(static_cast<std::size_t>(n_ant));
  for (Index n = 0; n < n_ant; ++n) {
    const auto row = h.matrix().row(n);
    outer[static_cast<std::size_t>(n)] = row.adjoint() * row;
  }

  std::vector<SelectionChoice<Real>> best(rhos.size());
  std::vector<Index> idx(static_cast<std::size_t>(users));
  for (Index i = 0; i < users; ++i) idx[static_cast<std::size_t>(i)] = i;

  CMatrix<Real> gram(users, users);
  RVector<Real> signal(users), interference(users), noise(users);
  do {
    gram.setZero();
    for (Index n : idx) gram += outer[static_cast<std::size_t>(n)];

    if (mode == CombinerMode::MF) {
      for (Index u = 0; u < users; ++u) {
        const Real g = gram(u, u).real();
        signal(u) = g * g;
        noise(u) = g;
        Real acc = 0;
        for (Index l = 0; l < users; ++l)
          if (l != u) acc += std::norm(gram(u, l));
        interference(u) = acc;
      }
    } else {
      Eigen::LLT<CMatrix<Real>> llt(gram);
      if (llt.info() != Eigen::Success ||
          !(llt.rcond() > Real(16) * std::numeric_limits<Real>::epsilon()))
        continue;
      const CMatrix<Real> inv = llt.solve(CMatrix<Real>::Identity(users, users));
      signal.setOnes();
      interference.setZero();
      noise = inv.diagonal().real();
    }

    for (std::size_t k = 0; k < rhos.size(); ++k) {
      const Real rho = rhos[k];
      Real rate = 0;
      for (Index u = 0; u < users; ++u)
        rate += std::log2(Real(1) + rho * signal(u) / (rho * interference(u) + noise(u)));
      if (detail::improves(rate, best[k].sum_rate)) {
        best[k].sum_rate = rate;
        best[k].antennas = idx;
      }
    }
  } while (detail::next_combination(idx, n_ant));

  for (const auto& b : best)
    if (b.antennas.empty())
      throw RankDeficient("antenna_selection: no invertible antenna subset",
                          std::numeric_limits<double>::infinity());
  return best;
}

/// Combiner that uses only `antennas` (one per RF chain), with MF or ZF on
/// the selected subchannel. Vectors are zero off the subset.
template <typename Real>
CombinerSet<Real> selection_combiner(const ChannelMatrix<Real>& h, const std::vector<Index>& antennas,
                                     CombinerMode mode) {
  const auto k = static_cast<Index>(antennas.size());
  CMatrix<Real> rf = CMatrix<Real>::Zero(h.n_antennas(), k);
  for (Index i = 0; i < k; ++i) rf(antennas[static_cast<std::size_t>(i)], i) = Complex<Real>(1);
  if (mode == CombinerMode::ZF) return zf_baseband(h, rf);
  CMatrix<Real> sub = rf.adjoint() * h.matrix();
  return CombinerSet<Real>(std::move(rf), std::move(sub));
}

/// Exhaustive antenna selection at a single SNR.
template <typename Real>
AntennaSelection<Real> antenna_selection_combiner(const ChannelMatrix<Real>& h, Real rho,
                                                  CombinerMode mode, double budget = 1e6) {
  const Real rhos[1] = {rho};
  auto choice = antenna_selection_search(h, std::span<const Real>(rhos), mode, budget);
  AntennaSelection<Real> out;
  out.antennas = std::move(choice.front().antennas);
  out.combiners = selection_combiner(h, out.antennas, mode);
  out.sum_rate = sinr(h, out.combiners, rho).sum_rate;
  return out;
}

}  // namespace swmimo
