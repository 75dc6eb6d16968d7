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

#include <catch_amalgamated.hpp>

#include <cmath>

#include "swmimo/combining.hpp"
#include "swmimo/metrics.hpp"

using namespace swmimo;
using Catch::Approx;

namespace {

ChannelMatrixd column(std::initializer_list<Complex<double>> values) {
  CMatrixd h(static_cast<Index>(values.size()), 1);
  Index i = 0;
  for (auto v : values) h(i++, 0) = v;
  return ChannelMatrixd(h);
}

ChannelMatrixd random_channel(Index n, Index u, std::uint64_t seed) {
  auto gen = substream(seed, {0xc0ffee});
  return generate_iid<double>(n, u, gen);
}

double single_user_snr(const ChannelMatrixd& h, const CombinerSetd& w, double rho) {
  return sinr(h, w, rho).per_user_sinr(0);
}

}  // namespace

TEST_CASE("PhaseBank invariants") {
  for (Index nq : {1, 2, 3, 4, 8, 16}) {
    const PhaseBankd bank(nq);
    REQUIRE(bank.size() == nq);
    CHECK(bank.shifter(0) == Complex<double>(1, 0));
    for (Index q = 0; q < nq; ++q) {
      CHECK(std::abs(bank.shifter(q)) == Approx(1.0).epsilon(1e-15));
      CHECK(bank.midpoints()(q) > 0.0);
      CHECK(bank.midpoints()(q) < kTwoPi<double>);
      if (q > 0) CHECK(bank.midpoints()(q) > bank.midpoints()(q - 1));
      // p_q = exp(-j q 2pi/NQ)
      const auto expected = std::polar(1.0, -double(q) * kTwoPi<double> / double(nq));
      CHECK(std::abs(bank.shifter(q) - expected) < 1e-15);
    }
  }
  CHECK_THROWS_AS(PhaseBankd(0), InvalidParameter);
}

TEST_CASE("assign_sector uses half-open sectors") {
  const PhaseBankd two(2);
  CHECK(assign_sector(0.3, two) == 0);
  CHECK(assign_sector(kPi<double>, two) == 1);

  const PhaseBankd four(4);
  CHECK(assign_sector(0.0, four) == 0);
  CHECK(assign_sector(kPi<double> / 2, four) == 1);
  CHECK(assign_sector(kPi<double>, four) == 2);
  CHECK(assign_sector(3 * kPi<double> / 2, four) == 3);
  CHECK(assign_sector(std::nextafter(kTwoPi<double>, 0.0), four) == 3);

  CHECK_THROWS_AS(assign_sector(-0.1, four), InvalidParameter);
  CHECK_THROWS_AS(assign_sector(kTwoPi<double>, four), InvalidParameter);
  CHECK_THROWS_AS(assign_sector(std::nan(""), four), InvalidParameter);
}

TEST_CASE("assign_sector matches nearest sector midpoint") {
  auto gen = substream(17, {1});
  std::uniform_real_distribution<double> angle(0.0, kTwoPi<double>);
  for (Index nq : {1, 2, 3, 4, 7, 8}) {
    const PhaseBankd bank(nq);
    for (int k = 0; k < 2000; ++k) {
      const double a = angle(gen);
      Index nearest = 0;
      double best = 10;
      for (Index q = 0; q < nq; ++q) {
        double d = std::abs(a - bank.midpoints()(q));
        d = std::min(d, kTwoPi<double> - d);
        if (d < best) best = d, nearest = q;
      }
      CHECK(assign_sector(a, bank) == nearest);
    }
  }
}

TEST_CASE("SwitchingMatrix forms") {
  const SwitchingMatrix s({0, 2, 2, 1}, 3);
  const Eigen::MatrixXi dense = s.one_hot();
  CHECK(dense.rows() == 4);
  CHECK(dense.cols() == 3);
  CHECK((dense.rowwise().sum().array() == 1).all());
  CHECK(dense(1, 2) == 1);
  const auto parts = s.partition();
  CHECK(parts[0] == std::vector<Index>{0});
  CHECK(parts[1] == std::vector<Index>{3});
  CHECK(parts[2] == std::vector<Index>{1, 2});
  CHECK_THROWS_AS(SwitchingMatrix({0, 3}, 3), InvalidParameter);
}

TEST_CASE("quasi-coherent combining on hand examples") {
  SECTION("all-ones channel is fully coherent") {
    const auto h = column({1, 1, 1, 1, 1});
    for (Index nq : {1, 2, 4, 8}) {
      const PhaseBankd bank(nq);
      const auto sc = quasi_coherent_switch_combiner(h, bank);
      CHECK(sc.switching[0].sectors() == std::vector<Index>(5, 0));
      CHECK(sc.combiners.vector(0) == CVectord::Ones(5));
      CHECK(std::abs(sc.combiners.vector(0).dot(h.column(0)) - 5.0) < 1e-15);
    }
  }

  SECTION("[1, j, -1, -j] with four shifters matches MRC") {
    const auto h = column({{1, 0}, {0, 1}, {-1, 0}, {0, -1}});
    const PhaseBankd bank(4);
    const auto sc = quasi_coherent_switch_combiner(h, bank);
    CHECK(sc.switching[0].sectors() == std::vector<Index>{0, 1, 2, 3});
    // Each rotation lands on +1.
    for (Index n = 0; n < 4; ++n)
      CHECK(std::abs(std::conj(sc.combiners.vector(0)(n)) * h(n, 0) - 1.0) < 1e-15);
    CHECK(std::norm(sc.combiners.vector(0).dot(h.column(0))) == Approx(16.0));
    CHECK(single_user_snr(h, sc.combiners, 1.0) == Approx(4.0));
    CHECK(single_user_snr(h, mrc_combiner(h), 1.0) == Approx(4.0));
  }

  SECTION("[1, -1] with two shifters") {
    const auto h = column({1, -1});
    const PhaseBankd bank(2);
    const auto sc = quasi_coherent_switch_combiner(h, bank);
    CHECK(sc.switching[0].sectors() == std::vector<Index>{0, 1});
    CHECK(std::abs(sc.combiners.vector(0).dot(h.column(0)) - 2.0) < 1e-15);
    CHECK(single_user_snr(h, sc.combiners, 3.0) == Approx(6.0));
  }
}

TEST_CASE("quasi-coherent combining invariants on random channels") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto h = random_channel(48, 3, seed);
    for (Index nq : {1, 2, 3, 4, 8}) {
      const PhaseBankd bank(nq);
      const auto sc = quasi_coherent_switch_combiner(h, bank);
      for (Index u = 0; u < 3; ++u) {
        const auto w = sc.combiners.vector(u);
        CHECK(w.squaredNorm() == Approx(48.0).epsilon(1e-14));
        // Rotated entries all sit in [0, 2pi/NQ).
        for (Index n = 0; n < 48; ++n) {
          const double a = entry_angle(std::conj(w(n)) * h(n, u));
          const double wrapped = a > kPi<double> + bank.sector_width() / 2 ? a - kTwoPi<double> : a;
          CHECK(wrapped >= -1e-12);
          CHECK(wrapped < bank.sector_width() + 1e-12);
        }
        // Hardware feasibility: w = S conj(p) for a one-hot S.
        const auto s = switching_from_combiner(w, bank);
        REQUIRE(s.has_value());
        CHECK(*s == sc.switching[static_cast<std::size_t>(u)]);
        CHECK((s->one_hot().rowwise().sum().array() == 1).all());
      }
    }
  }
}

TEST_CASE("switching_from_combiner rejects unrealisable vectors") {
  const PhaseBankd bank(4);
  CVectord w(3);
  w << 1.0, Complex<double>(0, 1), Complex<double>(std::sqrt(0.5), std::sqrt(0.5));
  CHECK_FALSE(switching_from_combiner(w, bank).has_value());
}

TEST_CASE("exhaustive switch search") {
  SECTION("[1, -1], NQ = 2 picks (0, 1) with |w^*h|^2 = 4") {
    const auto h = column({1, -1});
    const PhaseBankd bank(2);
    const auto best = exhaustive_switch_combiner(h, bank, 1.0);
    CHECK(best.switching[0].sectors() == std::vector<Index>{0, 1});
    CHECK(std::norm(best.combiners.vector(0).dot(h.column(0))) == Approx(4.0));

    // Independent enumeration of the four settings.
    double top = 0;
    for (double a : {1.0, -1.0})
      for (double b : {1.0, -1.0}) top = std::max(top, std::norm(a * 1.0 + b * -1.0));
    CHECK(top == Approx(4.0));
  }

  SECTION("all-ones channel keeps every antenna on shifter 0") {
    const auto h = column({1, 1, 1, 1});
    for (Index nq : {1, 2, 3}) {
      const PhaseBankd bank(nq);
      const auto best = exhaustive_switch_combiner(h, bank, 2.0);
      CHECK(best.switching[0] == quasi_coherent_switch_combiner(h, bank).switching[0]);
    }
  }

  SECTION("oracle dominates quasi-coherent combining") {
    const PhaseBankd bank(2);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto h = random_channel(6, 1, seed);
      const auto best = exhaustive_switch_combiner(h, bank, 10.0);
      const auto greedy = quasi_coherent_switch_combiner(h, bank);
      CHECK(single_user_snr(h, best.combiners, 10.0) >=
            single_user_snr(h, greedy.combiners, 10.0) * (1 - 1e-12));
    }
  }

  SECTION("joint multi-user search dominates and agrees with brute force") {
    const PhaseBankd bank(2);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto h = random_channel(4, 2, seed + 500);
      const auto best = exhaustive_switch_combiner(h, bank, 5.0);
      const auto greedy = quasi_coherent_switch_combiner(h, bank);
      CHECK(best.sum_rate >= sinr(h, greedy.combiners, 5.0).sum_rate - 1e-12);
      CHECK(best.sum_rate == Approx(sinr(h, best.combiners, 5.0).sum_rate).epsilon(1e-12));

      // Plain loop over all 2^8 sign patterns.
      double top = 0;
      for (int bits = 0; bits < 256; ++bits) {
        CMatrixd w(4, 2);
        for (int k = 0; k < 8; ++k) w(k % 4, k / 4) = (bits >> (7 - k)) & 1 ? -1.0 : 1.0;
        top = std::max(top, sinr(h, CombinerSetd(w), 5.0).sum_rate);
      }
      CHECK(best.sum_rate == Approx(top).epsilon(1e-12));
    }
  }

  SECTION("budget") {
    const auto h = random_channel(30, 1, 1);
    const PhaseBankd bank(2);
    try {
      exhaustive_switch_combiner(h, bank, 1.0);
      FAIL("expected SearchTooLarge");
    } catch (const SearchTooLarge& e) {
      CHECK(e.required() == Approx(std::pow(2.0, 30)));
      CHECK(std::string(e.what()).find("evaluations") != std::string::npos);
    }
    CHECK_NOTHROW(exhaustive_switch_combiner(random_channel(10, 1, 1), bank, 1.0, 1024));
  }
}

TEST_CASE("matched filter") {
  const auto ones = column({1, 1, 1, 1});
  CHECK(single_user_snr(ones, mrc_combiner(ones), 2.0) == Approx(8.0));

  const auto h = column({1, -1});
  CHECK(single_user_snr(h, mrc_combiner(h), 1.0) == Approx(2.0));
  const PhaseBankd bank(2);
  CHECK(single_user_snr(h, quasi_coherent_switch_combiner(h, bank).combiners, 1.0) /
            single_user_snr(h, mrc_combiner(h), 1.0) ==
        Approx(1.0));

  // No combiner beats MRC on its own channel.
  auto gen = substream(8, {2});
  ComplexNormal<double> cn;
  for (int trial = 0; trial < 50; ++trial) {
    const auto hc = generate_iid<double>(16, 1, gen);
    CVectord w(16);
    for (Index n = 0; n < 16; ++n) w(n) = cn(gen);
    CHECK(single_user_snr(hc, CombinerSetd(CMatrixd(w)), 1.0) <=
          single_user_snr(hc, mrc_combiner(hc), 1.0) * (1 + 1e-12));
  }
}

TEST_CASE("zero forcing") {
  SECTION("identity RF on orthonormal columns returns H") {
    CMatrixd q = random_channel(6, 2, 3).matrix().householderQr().householderQ() *
                 CMatrixd::Identity(6, 2);
    const ChannelMatrixd h(q);
    const auto zf = zf_combiner(h);
    CHECK((zf.composite() - q).norm() < 1e-12);
  }

  SECTION("nulls other users for every RF stage") {
    const PhaseBankd bank(4);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto h = random_channel(8, 2, seed);
      for (const auto& comb :
           {zf_combiner(h), zf_baseband(h, quasi_coherent_switch_combiner(h, bank).combiners.rf()),
            zf_baseband(h, phase_shifter_combiner(h).rf())}) {
        const CMatrixd g = comb.composite().adjoint() * h.matrix();
        CHECK((g - CMatrixd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-9 * h.norm());
        const auto m = sinr(h, comb, 10.0);
        const auto t = power_terms(h.matrix(), comb.composite());
        for (Index u = 0; u < 2; ++u) {
          CHECK(t.interference(u) < 1e-20);
          CHECK(m.per_user_rate(u) ==
                Approx(std::log2(1 + 10.0 / comb.vector(u).squaredNorm())).epsilon(1e-10));
        }
      }
    }
  }

  SECTION("singular effective channel") {
    CMatrixd m(4, 2);
    m.col(0) = random_channel(4, 1, 1).matrix();
    m.col(1) = 2.0 * m.col(0);
    CHECK_THROWS_AS(zf_combiner(ChannelMatrixd(m)), RankDeficient);
    CHECK_THROWS_AS(zf_baseband(random_channel(4, 2, 1), CMatrixd::Identity(4, 1).eval()),
                    RankDeficient);
  }
}

TEST_CASE("phase shifter combining") {
  const auto h = column({0.5, 1.0, 2.0});
  const auto ps = phase_shifter_combiner(h);
  CHECK(ps.vector(0) == CVectord::Ones(3));
  CHECK(single_user_snr(h, ps, 1.0) == Approx(3.5 * 3.5 / 3.0));

  // Equal-gain combining keeps (E|h|)^2 / E|h|^2 = pi/4 of the MRC SNR.
  const auto big = random_channel(10000, 1, 77);
  const double ratio = snr_ratio<double>(big.column(0), phase_shifter_combiner(big).vector(0));
  CHECK(ratio == Approx(kPi<double> / 4).epsilon(0.02));
  CHECK(phase_shifter_combiner(big).vector(0).squaredNorm() == Approx(10000.0));
}

TEST_CASE("antenna selection") {
  SECTION("single user picks the strongest antenna") {
    const auto h = random_channel(12, 1, 4);
    Index strongest = 0;
    h.matrix().col(0).cwiseAbs().maxCoeff(&strongest);
    for (auto mode : {CombinerMode::MF, CombinerMode::ZF}) {
      const auto sel = antenna_selection_combiner(h, 3.0, mode);
      CHECK(sel.antennas == std::vector<Index>{strongest});
      CHECK(single_user_snr(h, sel.combiners, 3.0) ==
            Approx(3.0 * std::norm(h(strongest, 0))).epsilon(1e-12));
    }
  }

  SECTION("matches brute force over all subsets") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto h = random_channel(4, 2, seed + 40);
      for (auto mode : {CombinerMode::MF, CombinerMode::ZF}) {
        const auto sel = antenna_selection_combiner(h, 4.0, mode);
        double top = -1;
        std::vector<Index> arg;
        for (Index a = 0; a < 4; ++a)
          for (Index b = a + 1; b < 4; ++b) {
            const double r = sinr(h, selection_combiner(h, {a, b}, mode), 4.0).sum_rate;
            if (r > top + 1e-12) top = r, arg = {a, b};
          }
        CHECK(sel.antennas == arg);
        CHECK(sel.sum_rate == Approx(top).epsilon(1e-10));
      }
    }
  }

  SECTION("embedded vectors are zero off the subset and below MRC") {
    const auto h = random_channel(10, 1, 9);
    const auto sel = antenna_selection_combiner(h, 1.0, CombinerMode::MF);
    Index nonzero = (sel.combiners.vector(0).array() != Complex<double>(0)).count();
    CHECK(nonzero == 1);
    CHECK(single_user_snr(h, sel.combiners, 1.0) <= single_user_snr(h, mrc_combiner(h), 1.0));
  }

  SECTION("per-SNR search returns one choice per SNR") {
    const auto h = random_channel(8, 2, 5);
    const std::vector<double> rhos{0.1, 1.0, 100.0};
    const auto choices = antenna_selection_search<double>(h, rhos, CombinerMode::ZF);
    REQUIRE(choices.size() == 3);
    for (std::size_t k = 0; k < 3; ++k)
      CHECK(choices[k].sum_rate ==
            Approx(antenna_selection_combiner(h, rhos[k], CombinerMode::ZF).sum_rate).epsilon(1e-9));
  }

  SECTION("budget") {
    // C(128, 4) is about 1.07e7.
    const auto h = random_channel(128, 4, 1);
    CHECK_THROWS_AS(antenna_selection_combiner(h, 1.0, CombinerMode::MF), SearchTooLarge);
    CHECK_NOTHROW(antenna_selection_combiner(random_channel(64, 3, 1), 1.0, CombinerMode::MF));
  }
}

TEST_CASE("single precision combining") {
  auto gen = substream(2, {0});
  const auto h = generate_iid<float>(32, 2, gen);
  const PhaseBank<float> bank(4);
  const auto sc = quasi_coherent_switch_combiner(h, bank);
  CHECK(sc.combiners.vector(0).squaredNorm() == Approx(32.0f).epsilon(1e-5));
  const auto zf = zf_baseband(h, sc.combiners.rf(), 1e6f);
  CHECK(sinr(h, zf, 1.0f).sum_rate > 0.0f);
}
