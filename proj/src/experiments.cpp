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

#include "swmimo/experiments.hpp"

#include <atomic>
#include <charconv>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "swmimo/asymptotics.hpp"
#include "swmimo/combining.hpp"
#include "swmimo/metrics.hpp"
#include "swmimo/stats.hpp"

namespace swmimo {

namespace {

// Stream-path tags keep the substreams of different experiments apart.
constexpr std::uint64_t kTagSnrRatio = 0x1001;
constexpr std::uint64_t kTagRate = 0x1002;
constexpr std::uint64_t kTagInterference = 0x1003;
constexpr std::uint64_t kTagProposition = 0x1004;
constexpr std::uint64_t kTagOracle = 0x1005;

constexpr int kMaxRedraws = 1000;

// Runs body(i) for i in [0, count) on `threads` workers. Work items write
// only to their own output slots, so results do not depend on scheduling.
template <typename Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next.store(count);
          return;
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

ResultRow make_row(const ExperimentConfig& cfg, std::string arch, std::string combiner, Index n,
                   Index u, Index nq, std::optional<double> snr_db, std::size_t trials,
                   std::string metric, double mean, double ci95) {
  return {to_string(cfg.kind), std::move(arch), std::move(combiner), n, u, nq, snr_db, trials,
          std::move(metric), mean, ci95, cfg.system.rng_seed};
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::SnrRatioConvergence: return "snr_ratio_convergence";
    case ExperimentKind::RateVsSnr: return "rate_vs_snr";
    case ExperimentKind::InterferenceDistribution: return "interference_distribution";
    case ExperimentKind::Proposition1Convergence: return "proposition1_convergence";
    case ExperimentKind::OracleGap: return "oracle_gap";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw InvalidParameter(field + ": " + why);
  };
  if (system.n_users < 1) fail("system.U", "must be >= 1");
  if (system.n_antennas < system.n_users) fail("system.N", "must be >= system.U");
  if (system.n_rf_chains < system.n_users) fail("system.NRF", "must be >= system.U");
  if (system.n_quant_phases < 1) fail("system.NQ", "must be >= 1");
  if (n_trials < 1) fail("run.trials", "must be >= 1");
  if (threads < 1) fail("run.threads", "must be >= 1");

  const bool needs_n = kind != ExperimentKind::RateVsSnr;
  if (needs_n && n_list.empty()) fail("sweep.n_list", "must be nonempty");
  for (Index n : n_list)
    if (n < 1) fail("sweep.n_list", "entries must be >= 1");
  if (nq_list.empty() && kind != ExperimentKind::RateVsSnr) fail("sweep.nq_list", "must be nonempty");
  for (Index q : nq_list)
    if (q < 1) fail("sweep.nq_list", "entries must be >= 1");
  const bool needs_snr = kind == ExperimentKind::RateVsSnr ||
                         kind == ExperimentKind::Proposition1Convergence ||
                         kind == ExperimentKind::OracleGap;
  if (needs_snr && snr_db_list.empty()) fail("sweep.snr_db_list", "must be nonempty");
  for (double s : snr_db_list)
    if (!std::isfinite(s)) fail("sweep.snr_db_list", "entries must be finite");

  switch (kind) {
    case ExperimentKind::RateVsSnr:
      if (architectures.empty()) fail("architectures", "must be nonempty");
      break;
    case ExperimentKind::InterferenceDistribution:
      if (system.n_users < 2) fail("system.U", "interference distribution needs U >= 2");
      break;
    case ExperimentKind::Proposition1Convergence:
      for (Index n : n_list)
        if ((n * system.n_users) % system.n_antennas != 0)
          fail("sweep.n_list", "N=" + std::to_string(n) + " does not keep N/U = system.N/system.U integral");
      break;
    case ExperimentKind::OracleGap:
      for (Index n : n_list)
        if (n < system.n_users) fail("sweep.n_list", "entries must be >= system.U");
      break;
    default:
      break;
  }
  for (const auto& [arch, nf] : nf_overrides)
    if (!(nf >= 0)) fail(std::string("nf.presets.") + swmimo::to_string(arch), "must be >= 0");
}

double ExperimentConfig::noise_figure(Architecture arch) const {
  if (nf_mode == NfMode::None) return 0.0;
  if (auto it = nf_overrides.find(arch); it != nf_overrides.end()) return it->second;
  return preset_nf(arch);
}

ExperimentConfig default_experiment_config(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  c.system.rng_seed = 1;
  switch (kind) {
    case ExperimentKind::SnrRatioConvergence:
      c.system.n_antennas = 64;
      c.system.n_users = 1;
      c.system.n_rf_chains = 1;
      for (Index k = 6; k <= 14; ++k) c.n_list.push_back(Index(1) << k);
      c.nq_list = {2, 4, 8};
      c.n_trials = 100;
      break;
    case ExperimentKind::RateVsSnr:
      c.system.n_antennas = 64;
      c.system.n_users = 3;
      c.system.n_rf_chains = 3;
      c.system.n_quant_phases = 4;
      for (int s = -10; s <= 30; s += 5) c.snr_db_list.push_back(s);
      c.n_trials = 500;
      for (auto a : {Architecture::FullyDigital, Architecture::PsHybrid, Architecture::SwitchHybrid,
                     Architecture::AntennaSelection})
        for (auto m : {CombinerMode::MF, CombinerMode::ZF}) c.architectures.push_back({a, m});
      c.nf_mode = NfMode::Preset;
      break;
    case ExperimentKind::InterferenceDistribution:
      c.system.n_antennas = 64;
      c.system.n_users = 2;
      c.system.n_rf_chains = 2;
      c.n_list = {64};
      c.nq_list = {4};
      c.n_trials = 100000;
      break;
    case ExperimentKind::Proposition1Convergence:
      c.system.n_antennas = 512;
      c.system.n_users = 16;
      c.system.n_rf_chains = 16;
      c.n_list = {128, 256, 512};
      c.nq_list = {4};
      c.snr_db_list = {40.0};
      c.n_trials = 200;
      break;
    case ExperimentKind::OracleGap:
      c.system.n_antennas = 6;
      c.system.n_users = 1;
      c.system.n_rf_chains = 1;
      c.n_list = {2, 3, 4, 5, 6};
      c.nq_list = {2};
      c.snr_db_list = {10.0};
      c.n_trials = 200;
      break;
  }
  return c;
}

ExperimentResult run_snr_ratio_convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  ExperimentResult out;
  const auto trials = cfg.n_trials;
  const auto nqs = cfg.nq_list.size();
  std::vector<PhaseBankd> banks;
  for (Index q : cfg.nq_list) banks.emplace_back(q);

  for (Index n : cfg.n_list) {
    // ratio[q * trials + t]; every NQ sees the same channel draws.
    std::vector<double> ratio(nqs * trials);
    parallel_for(trials, cfg.threads, [&](std::size_t t) {
      auto gen = substream(cfg.system.rng_seed, {kTagSnrRatio, std::uint64_t(n), t});
      const auto h = generate_iid<double>(n, 1, gen);
      for (std::size_t q = 0; q < nqs; ++q) {
        const auto sc = quasi_coherent_switch_combiner(h, banks[q]);
        ratio[q * trials + t] = snr_ratio<double>(h.column(0), sc.combiners.vector(0));
      }
    });
    for (std::size_t q = 0; q < nqs; ++q) {
      const auto s = stats::mean_ci(std::span(ratio).subspan(q * trials, trials));
      const Index nq = cfg.nq_list[q];
      out.rows.push_back(make_row(cfg, "switch_hybrid", "MF", n, 1, nq, {}, trials, "snr_ratio",
                                  s.mean, s.ci95));
      out.rows.push_back(make_row(cfg, "switch_hybrid", "MF", n, 1, nq, {}, trials, "gamma_limit",
                                  gamma_factor(nq), 0.0));
    }
  }
  return out;
}

namespace {

// Per-user rate of one architecture for every effective SNR in `rhos`.
void architecture_rates(const ChannelMatrixd& h, const ArchitectureSpec& spec,
                        const PhaseBankd& bank, const ExperimentConfig& cfg,
                        std::span<const double> rhos, std::span<double> per_user_rate) {
  const double users = static_cast<double>(h.n_users());
  if (spec.arch == Architecture::AntennaSelection) {
    const auto best = antenna_selection_search(h, rhos, spec.mode, cfg.selection_budget);
    for (std::size_t k = 0; k < rhos.size(); ++k) per_user_rate[k] = best[k].sum_rate / users;
    return;
  }
  CombinerSetd comb;
  switch (spec.arch) {
    case Architecture::FullyDigital:
      comb = spec.mode == CombinerMode::MF ? mrc_combiner(h) : zf_combiner(h, cfg.zf_max_condition);
      break;
    case Architecture::PsHybrid: {
      auto rf = phase_shifter_combiner(h);
      comb = spec.mode == CombinerMode::MF ? rf : zf_baseband(h, rf.rf(), cfg.zf_max_condition);
      break;
    }
    case Architecture::SwitchHybrid: {
      auto rf = quasi_coherent_switch_combiner(h, bank).combiners;
      comb = spec.mode == CombinerMode::MF ? rf : zf_baseband(h, rf.rf(), cfg.zf_max_condition);
      break;
    }
    case Architecture::AntennaSelection:
      break;
  }
  const auto terms = power_terms(h.matrix(), comb.composite());
  for (std::size_t k = 0; k < rhos.size(); ++k)
    per_user_rate[k] = metrics_from_terms(terms, rhos[k]).sum_rate / users;
}

}  // namespace

ExperimentResult run_rate_vs_snr(const ExperimentConfig& cfg) {
  cfg.validate();
  const Index n = cfg.system.n_antennas;
  const Index users = cfg.system.n_users;
  const Index nq = cfg.system.n_quant_phases;
  const PhaseBankd bank(nq);
  const auto trials = cfg.n_trials;
  const auto n_arch = cfg.architectures.size();
  const auto n_snr = cfg.snr_db_list.size();

  std::vector<std::vector<double>> rhos(n_arch);
  for (std::size_t a = 0; a < n_arch; ++a)
    for (double s : cfg.snr_db_list)
      rhos[a].push_back(db_to_linear(apply_nf_penalty(s, cfg.noise_figure(cfg.architectures[a].arch))));

  // rate[(a * n_snr + k) * trials + t]
  std::vector<double> rate(n_arch * n_snr * trials);
  std::vector<double> redraws(trials, 0.0);
  parallel_for(trials, cfg.threads, [&](std::size_t t) {
    std::vector<double> local(n_arch * n_snr);
    for (int attempt = 0;; ++attempt) {
      auto gen = substream(cfg.system.rng_seed, {kTagRate, t, std::uint64_t(attempt)});
      const auto h = generate_iid<double>(n, users, gen);
      try {
        for (std::size_t a = 0; a < n_arch; ++a)
          architecture_rates(h, cfg.architectures[a], bank, cfg, rhos[a],
                             std::span(local).subspan(a * n_snr, n_snr));
      } catch (const RankDeficient&) {
        if (attempt + 1 >= kMaxRedraws) throw;
        redraws[t] += 1.0;
        continue;
      }
      break;
    }
    for (std::size_t i = 0; i < local.size(); ++i) rate[i * trials + t] = local[i];
  });

  ExperimentResult out;
  for (std::size_t a = 0; a < n_arch; ++a) {
    const auto& spec = cfg.architectures[a];
    for (std::size_t k = 0; k < n_snr; ++k) {
      const auto s = stats::mean_ci(std::span(rate).subspan((a * n_snr + k) * trials, trials));
      out.rows.push_back(make_row(cfg, to_string(spec.arch), to_string(spec.mode), n, users, nq,
                                  cfg.snr_db_list[k], trials, "per_user_rate", s.mean, s.ci95));
    }
  }
  const double total_redraws = stats::pairwise_sum(redraws);
  out.rows.push_back(make_row(cfg, "all", "ZF", n, users, nq, {}, trials, "zf_redraws",
                              total_redraws, 0.0));
  out.rows.push_back(make_row(cfg, "all", "ZF", n, users, nq, {}, trials, "zf_redraw_fraction",
                              total_redraws / (total_redraws + static_cast<double>(trials)), 0.0));
  return out;
}

ExperimentResult run_interference_distribution(const ExperimentConfig& cfg) {
  cfg.validate();
  const Index users = cfg.system.n_users;
  const auto trials = cfg.n_trials;
  const auto per_trial = static_cast<std::size_t>(users - 1);
  ExperimentResult out;
  for (Index n : cfg.n_list) {
    for (Index nq : cfg.nq_list) {
      const PhaseBankd bank(nq);
      std::vector<double> samples(trials * per_trial);
      parallel_for(trials, cfg.threads, [&](std::size_t t) {
        auto gen = substream(cfg.system.rng_seed,
                             {kTagInterference, std::uint64_t(n), std::uint64_t(nq), t});
        const auto h = generate_iid<double>(n, users, gen);
        // User 0's combiner against every other user's channel: given w_0
        // these are independent, each CN(0, N) before squaring.
        const ChannelMatrixd own(h.matrix().leftCols(1));
        const auto sc = quasi_coherent_switch_combiner(own, bank);
        const auto w = sc.combiners.vector(0);
        for (Index l = 1; l < users; ++l)
          samples[t * per_trial + static_cast<std::size_t>(l - 1)] = std::norm(w.dot(h.column(l)));
      });
      const auto s = stats::mean_ci(samples);
      const double mean_n = static_cast<double>(n);
      const auto ks = stats::ks_test(samples, [mean_n](double x) {
        return x <= 0 ? 0.0 : -std::expm1(-x / mean_n);
      });
      const auto count = samples.size();
      auto row = [&](const char* metric, double v, double ci = 0.0) {
        out.rows.push_back(make_row(cfg, "switch_hybrid", "MF", n, users, nq, {}, count, metric, v, ci));
      };
      row("mean", s.mean, s.ci95);
      row("variance", s.variance);
      row("cv2", s.variance / (s.mean * s.mean));
      row("ks_statistic", ks.statistic);
      row("ks_critical_1pct", ks.critical_1pct);
      row("ks_pvalue", ks.p_value);
    }
  }
  return out;
}

ExperimentResult run_proposition1_convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto trials = cfg.n_trials;
  ExperimentResult out;
  for (Index n : cfg.n_list) {
    const Index users = n * cfg.system.n_users / cfg.system.n_antennas;
    if (users < 1) throw InvalidParameter("sweep.n_list: N=" + std::to_string(n) + " gives U < 1");
    for (Index nq : cfg.nq_list) {
      const PhaseBankd bank(nq);
      const double limit = sinr_limit(n, users, nq);
      for (double snr_db : cfg.snr_db_list) {
        const double rho = db_to_linear(snr_db);
        std::vector<double> mean_sinr(trials), signal(trials), impairment(trials);
        parallel_for(trials, cfg.threads, [&](std::size_t t) {
          auto gen = substream(cfg.system.rng_seed,
                               {kTagProposition, std::uint64_t(n), std::uint64_t(nq), t});
          const auto h = generate_iid<double>(n, users, gen);
          const auto sc = quasi_coherent_switch_combiner(h, bank);
          const auto terms = power_terms(h.matrix(), sc.combiners.composite());
          mean_sinr[t] = metrics_from_terms(terms, rho).per_user_sinr.mean();
          signal[t] = terms.signal.mean();
          impairment[t] = (terms.interference + terms.noise_gain / rho).mean();
        });
        const auto s = stats::mean_ci(mean_sinr);
        const double pooled = stats::pairwise_sum(signal) / stats::pairwise_sum(impairment);
        auto row = [&](const char* metric, double v, double ci = 0.0) {
          out.rows.push_back(make_row(cfg, "switch_hybrid", "MF", n, users, nq, snr_db, trials, metric, v, ci));
        };
        row("mean_sinr", s.mean, s.ci95);
        row("sinr_limit", limit);
        row("relative_error", std::abs(s.mean - limit) / limit);
        row("pooled_power_sinr", pooled);
      }
    }
  }
  return out;
}

ExperimentResult run_oracle_gap(const ExperimentConfig& cfg) {
  cfg.validate();
  const Index users = cfg.system.n_users;
  const auto trials = cfg.n_trials;
  ExperimentResult out;
  for (Index n : cfg.n_list) {
    for (Index nq : cfg.nq_list) {
      const PhaseBankd bank(nq);
      for (double snr_db : cfg.snr_db_list) {
        const double rho = db_to_linear(snr_db);
        std::vector<double> oracle(trials), greedy(trials), gap(trials), violation(trials);
        parallel_for(trials, cfg.threads, [&](std::size_t t) {
          auto gen = substream(cfg.system.rng_seed,
                               {kTagOracle, std::uint64_t(n), std::uint64_t(nq), t});
          const auto h = generate_iid<double>(n, users, gen);
          const auto best = exhaustive_switch_combiner(h, bank, rho, cfg.exhaustive_budget);
          const auto fast = quasi_coherent_switch_combiner(h, bank);
          const auto fast_metrics = sinr(h, fast.combiners, rho);
          oracle[t] = best.sum_rate;
          greedy[t] = fast_metrics.sum_rate;
          violation[t] = best.sum_rate < greedy[t] - 1e-12 * std::max(1.0, greedy[t]) ? 1.0 : 0.0;
          if (users == 1) {
            const double best_snr = sinr(h, best.combiners, rho).per_user_sinr(0);
            gap[t] = best_snr > 0 ? (best_snr - fast_metrics.per_user_sinr(0)) / best_snr : 0.0;
          } else {
            gap[t] = best.sum_rate > 0 ? (best.sum_rate - greedy[t]) / best.sum_rate : 0.0;
          }
        });
        auto row = [&](const char* metric, double v, double ci = 0.0) {
          out.rows.push_back(make_row(cfg, "switch_hybrid", "MF", n, users, nq, snr_db, trials, metric, v, ci));
        };
        const auto so = stats::mean_ci(oracle);
        const auto sg = stats::mean_ci(greedy);
        const auto sgap = stats::mean_ci(gap);
        row("oracle_sum_rate", so.mean, so.ci95);
        row("greedy_sum_rate", sg.mean, sg.ci95);
        row(users == 1 ? "relative_snr_gap" : "relative_rate_gap", sgap.mean, sgap.ci95);
        row("dominance_violations", stats::pairwise_sum(violation));
      }
    }
  }
  return out;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  switch (cfg.kind) {
    case ExperimentKind::SnrRatioConvergence: return run_snr_ratio_convergence(cfg);
    case ExperimentKind::RateVsSnr: return run_rate_vs_snr(cfg);
    case ExperimentKind::InterferenceDistribution: return run_interference_distribution(cfg);
    case ExperimentKind::Proposition1Convergence: return run_proposition1_convergence(cfg);
    case ExperimentKind::OracleGap: return run_oracle_gap(cfg);
  }
  throw InvalidParameter("unknown experiment kind");
}

const ResultRow* ExperimentResult::find(const std::string& metric, const std::string& architecture,
                                        const std::string& combiner, std::optional<Index> n_antennas,
                                        std::optional<Index> n_quant,
                                        std::optional<double> snr_db) const {
  for (const auto& r : rows) {
    if (r.metric != metric) continue;
    if (!architecture.empty() && r.architecture != architecture) continue;
    if (!combiner.empty() && r.combiner != combiner) continue;
    if (n_antennas && r.n_antennas != *n_antennas) continue;
    if (n_quant && r.n_quant != *n_quant) continue;
    if (snr_db && (!r.snr_db || *r.snr_db != *snr_db)) continue;
    return &r;
  }
  return nullptr;
}

std::string ExperimentResult::to_csv() const {
  std::ostringstream os;
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    os << r.experiment << ',' << r.architecture << ',' << r.combiner << ',' << r.n_antennas << ','
       << r.n_users << ',' << r.n_quant << ',' << (r.snr_db ? format_double(*r.snr_db) : "") << ','
       << r.trials << ',' << r.metric << ',' << format_double(r.mean) << ','
       << format_double(r.ci95) << ',' << r.seed << '\n';
  }
  return os.str();
}

std::string ExperimentResult::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"experiment", r.experiment},
                         {"architecture", r.architecture},
                         {"combiner", r.combiner},
                         {"N", r.n_antennas},
                         {"U", r.n_users},
                         {"NQ", r.n_quant},
                         {"snr_db", r.snr_db ? nlohmann::json(*r.snr_db) : nlohmann::json(nullptr)},
                         {"trials", r.trials},
                         {"metric", r.metric},
                         {"mean", r.mean},
                         {"ci95", r.ci95},
                         {"seed", r.seed}});
  }
  return nlohmann::json{{"rows", rows_json}}.dump(2) + "\n";
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
    os << content;
    os.close();
    if (!os) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("failed writing '" + tmp.string() + "'");
    }
  }
  fs::rename(tmp, target);
}

}  // namespace swmimo
