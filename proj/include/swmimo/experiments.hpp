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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swmimo/channel.hpp"
#include "swmimo/combiner_set.hpp"
#include "swmimo/rfchain.hpp"

namespace swmimo {

enum class ExperimentKind {
  SnrRatioConvergence,
  RateVsSnr,
  InterferenceDistribution,
  Proposition1Convergence,
  OracleGap,
};

const char* to_string(ExperimentKind kind);

enum class NfMode { None, Preset };

struct ArchitectureSpec {
  Architecture arch = Architecture::SwitchHybrid;
  CombinerMode mode = CombinerMode::MF;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::SnrRatioConvergence;
  SystemConfig system;
  std::vector<Index> n_list;
  std::vector<double> snr_db_list;
  std::vector<Index> nq_list;
  std::size_t n_trials = 100;
  std::vector<ArchitectureSpec> architectures;
  NfMode nf_mode = NfMode::None;
  std::map<Architecture, double> nf_overrides;  // replaces preset_nf() per architecture
  unsigned threads = 1;
  double zf_max_condition = 1e10;
  double selection_budget = 1e6;
  double exhaustive_budget = 1e7;

  /// Throws InvalidParameter naming the offending field.
  void validate() const;

  /// Noise figure applied to `arch` (0 when nf_mode is None).
  double noise_figure(Architecture arch) const;
};

/// Defaults for each experiment: the single-user convergence sweep
/// N = 2^6..2^14, the N = 64, U = 3 architecture comparison, and so on.
ExperimentConfig default_experiment_config(ExperimentKind kind);

struct ResultRow {
  std::string experiment;
  std::string architecture;
  std::string combiner;
  Index n_antennas = 0;
  Index n_users = 0;
  Index n_quant = 0;
  std::optional<double> snr_db;  // empty when the metric does not depend on SNR
  std::size_t trials = 0;
  std::string metric;
  double mean = 0;
  double ci95 = 0;
  std::uint64_t seed = 0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;

  /// First row matching all given fields, or nullptr.
  const ResultRow* find(const std::string& metric, const std::string& architecture = "",
                        const std::string& combiner = "", std::optional<Index> n_antennas = {},
                        std::optional<Index> n_quant = {},
                        std::optional<double> snr_db = {}) const;

  std::string to_csv() const;
  std::string to_json() const;
};

inline constexpr const char* kCsvHeader =
    "experiment,architecture,combiner,N,U,NQ,snr_db,trials,metric,mean,ci95,seed";

/// Single-user SNR of quasi-coherent switch combining over MRC versus N,
/// with the closed-form limit as a reference row.
ExperimentResult run_snr_ratio_convergence(const ExperimentConfig& cfg);

/// Per-user rate (sum rate / U, averaged over trials) of each architecture
/// and combiner across the SNR sweep.
ExperimentResult run_rate_vs_snr(const ExperimentConfig& cfg);

/// Distribution of |w_u^* h_l|^2 for a switch combiner w_u and an
/// independent user channel h_l, against Exp(mean N).
ExperimentResult run_interference_distribution(const ExperimentConfig& cfg);

/// Mean SINR of switch combining against (N/U) gamma along a sweep with
/// fixed N/U (taken from system.N / system.U).
ExperimentResult run_proposition1_convergence(const ExperimentConfig& cfg);

/// Exhaustive switch search versus quasi-coherent combining on small instances.
ExperimentResult run_oracle_gap(const ExperimentConfig& cfg);

ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Writes `content` to `path` through a temporary file and rename, so a
/// failed run never leaves a partial file behind.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace swmimo
