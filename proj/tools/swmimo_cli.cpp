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

// Command-line front end: experiment runs, closed-form limits, noise-figure
// cascades and the statistical self-check.
//
// Exit codes: 0 success, 1 configuration or usage error, 2 runtime error.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "swmimo/asymptotics.hpp"
#include "swmimo/config.hpp"
#include "swmimo/experiments.hpp"
#include "swmimo/rfchain.hpp"

namespace {

using namespace swmimo;

struct CommonOptions {
  std::string config_path;
  std::string output_path;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::size_t> trials;
  bool verbose = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-c,--config", o.config_path, "JSON configuration file");
  cmd->add_option("-o,--output", o.output_path, "Output file (default: standard output)");
  cmd->add_option("-f,--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("-s,--seed", o.seed, "Override run.seed");
  cmd->add_option("-j,--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("-t,--trials", o.trials, "Override run.trials")->check(CLI::PositiveNumber);
  cmd->add_flag("-v,--verbose", o.verbose, "Progress messages on standard error");
}

RunConfig resolve_config(const CommonOptions& o, ExperimentKind kind) {
  RunConfig rc = o.config_path.empty() ? parse_run_config("{}", kind)
                                       : load_run_config(o.config_path, kind);
  if (o.seed) rc.experiment.system.rng_seed = *o.seed;
  if (o.threads) rc.experiment.threads = *o.threads;
  if (o.trials) rc.experiment.n_trials = *o.trials;
  if (!o.output_path.empty()) rc.output_path = o.output_path;
  if (o.format == "csv") rc.format = OutputFormat::Csv;
  if (o.format == "json") rc.format = OutputFormat::Json;
  try {
    rc.experiment.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
  return rc;
}

void emit(const RunConfig& rc, const std::string& text) {
  if (rc.output_path.empty())
    std::cout << text;
  else
    write_file_atomic(rc.output_path, text);
}

int run_experiment_command(const CommonOptions& o, ExperimentKind kind) {
  const RunConfig rc = resolve_config(o, kind);
  const auto start = std::chrono::steady_clock::now();
  if (o.verbose)
    std::cerr << "running " << to_string(kind) << " with " << rc.experiment.n_trials
              << " trials on " << rc.experiment.threads << " thread(s)\n";
  const auto result = run_experiment(rc.experiment);
  emit(rc, rc.format == OutputFormat::Json ? result.to_json() : result.to_csv());
  if (o.verbose)
    std::cerr << "done in "
              << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
              << " s\n";
  return 0;
}

char* fmt(char* buf, std::size_t size, const char* f, double v) {
  std::snprintf(buf, size, f, v);
  return buf;
}

int run_limits(Index n, Index u, Index nq) {
  const auto p = predict(n, u, nq);
  char b[64];
  std::cout << "N=" << n << " U=" << u << " NQ=" << nq << '\n'
            << "gamma=" << fmt(b, sizeof b, "%.6f", p.gamma) << '\n'
            << "sinr_limit=" << fmt(b, sizeof b, "%.4f", p.sinr_limit) << '\n'
            << "rate_limit=" << fmt(b, sizeof b, "%.4f", p.rate_limit) << '\n';
  return 0;
}

int run_nf(const CommonOptions& o) {
  NoiseStageChain chain;
  if (!o.config_path.empty()) {
    const auto rc = load_run_config(o.config_path, ExperimentKind::RateVsSnr);
    if (!rc.chain) throw ConfigError(o.config_path + ": nf.chain: required for the nf command");
    chain = *rc.chain;
  } else {
    const auto& cat = example_stage_catalog();
    chain.stages = {cat.at("lna"), cat.at("mixer")};
  }
  char b[64];
  if (o.verbose)
    for (const auto& s : chain.stages)
      std::cerr << "stage " << s.label << " gain " << s.gain_db << " dB, NF " << s.nf_db << " dB\n";
  std::cout << "composite_nf_db=" << fmt(b, sizeof b, "%.2f", friis_composite_nf(chain)) << '\n';
  return 0;
}

int run_validate(std::uint64_t seed, std::size_t samples) {
  bool ok = true;
  char b[160];
  auto report = [&](bool pass, const std::string& what) {
    ok = ok && pass;
    std::cout << (pass ? "PASS " : "FAIL ") << what << '\n';
  };

  double max_diff = 0;
  for (Index q = 1; q <= 10000; ++q) max_diff = std::max(max_diff, appendix_identity_check(q).abs_diff);
  std::snprintf(b, sizeof b, "half-angle identity, NQ=1..10000: max |lhs-rhs| = %.3e", max_diff);
  report(max_diff < 1e-12, b);

  for (Index q : {1, 2, 4, 8}) {
    const auto rep = sector_expectation_check(q, samples, seed);
    for (const auto& e : rep.entries) {
      // Closed forms such as sin(2 pi) leave residue around 1e-16.
      const double target = std::abs(e.target) < 1e-12 ? 0.0 : e.target;
      std::snprintf(b, sizeof b, "sector expectation NQ=%ld %-12s est=%.6f target=%.6f z=%+.2f",
                    static_cast<long>(q), e.name.c_str(), e.estimate, target, e.z_score);
      report(std::abs(e.z_score) < 4.0, b);
    }
  }

  auto cfg = default_experiment_config(ExperimentKind::InterferenceDistribution);
  cfg.system.rng_seed = seed;
  cfg.n_trials = samples;
  const auto res = run_interference_distribution(cfg);
  const double mean = res.find("mean")->mean;
  const double cv2 = res.find("cv2")->mean;
  const double ks = res.find("ks_statistic")->mean;
  const double crit = res.find("ks_critical_1pct")->mean;
  std::snprintf(b, sizeof b, "interference N=64: mean=%.3f (Exp mean 64)", mean);
  report(mean > 62 && mean < 66, b);
  std::snprintf(b, sizeof b, "interference N=64: var/mean^2=%.4f", cv2);
  report(cv2 > 0.94 && cv2 < 1.06, b);
  std::snprintf(b, sizeof b, "interference N=64: KS D=%.5f, 1%% critical %.5f", ks, crit);
  report(ks < crit, b);
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Switch-based massive MIMO combining simulator"};
  app.require_subcommand(1);

  CommonOptions fig2_opts, fig3_opts, gap_opts, nf_opts;
  auto* fig2 = app.add_subcommand("fig2", "SNR ratio of switch combining over MRC versus N");
  add_common(fig2, fig2_opts);
  auto* fig3 = app.add_subcommand("fig3", "Per-user rate of each receiver architecture versus SNR");
  add_common(fig3, fig3_opts);
  auto* gap = app.add_subcommand("oracle-gap", "Exhaustive switch search versus quasi-coherent combining");
  add_common(gap, gap_opts);

  auto* nf = app.add_subcommand("nf", "Composite noise figure of an RF stage chain (Friis)");
  nf->add_option("-c,--config", nf_opts.config_path, "JSON configuration with nf.chain");
  nf->add_flag("-v,--verbose", nf_opts.verbose, "List the stages on standard error");

  Index lim_n = 64, lim_u = 3, lim_nq = 4;
  auto* limits = app.add_subcommand("limits", "Closed-form gamma, SINR and rate limits");
  limits->add_option("-N,--antennas", lim_n, "Number of antennas")->capture_default_str();
  limits->add_option("-U,--users", lim_u, "Number of users")->capture_default_str();
  limits->add_option("-Q,--nq", lim_nq, "Number of constant phase shifters")->capture_default_str();

  std::uint64_t val_seed = 1;
  std::size_t val_samples = 100000;
  auto* validate = app.add_subcommand("validate", "Statistical self-checks of the model");
  validate->add_option("-s,--seed", val_seed, "Seed")->capture_default_str();
  validate->add_option("-n,--samples", val_samples, "Samples per check")->check(CLI::Range(10000, 100000000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*fig2) return run_experiment_command(fig2_opts, ExperimentKind::SnrRatioConvergence);
    if (*fig3) return run_experiment_command(fig3_opts, ExperimentKind::RateVsSnr);
    if (*gap) return run_experiment_command(gap_opts, ExperimentKind::OracleGap);
    if (*nf) return run_nf(nf_opts);
    if (*limits) return run_limits(lim_n, lim_u, lim_nq);
    if (*validate) return run_validate(val_seed, val_samples);
  } catch (const InvalidParameter& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
