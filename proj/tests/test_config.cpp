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

#include <filesystem>
#include <fstream>

#include "swmimo/config.hpp"

using namespace swmimo;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::StartsWith;

TEST_CASE("full document") {
  const auto rc = parse_run_config(R"({
    "system": {"N": 32, "U": 2, "NRF": 4, "NQ": 8},
    "sweep": {"snr_db_list": [-5, 0, 12.5]},
    "run": {"trials": 40, "seed": 99, "threads": 3},
    "architectures": [{"name": "switch_hybrid", "combiner": "ZF"},
                      {"name": "antenna_selection", "combiner": "mf"}],
    "nf": {"mode": "preset", "presets": {"switch_hybrid": 6.0},
           "chain": [{"stage": "switch"}, {"label": "amp", "gain_db": 20, "nf_db": 2}]},
    "output": {"path": "out.json", "format": "json"}
  })", ExperimentKind::RateVsSnr);
  const auto& ex = rc.experiment;
  CHECK(ex.kind == ExperimentKind::RateVsSnr);
  CHECK(ex.system.n_antennas == 32);
  CHECK(ex.system.n_users == 2);
  CHECK(ex.system.n_rf_chains == 4);
  CHECK(ex.system.n_quant_phases == 8);
  CHECK(ex.snr_db_list == std::vector<double>{-5, 0, 12.5});
  CHECK(ex.n_trials == 40);
  CHECK(ex.system.rng_seed == 99);
  CHECK(ex.threads == 3);
  REQUIRE(ex.architectures.size() == 2);
  CHECK(ex.architectures[0].arch == Architecture::SwitchHybrid);
  CHECK(ex.architectures[0].mode == CombinerMode::ZF);
  CHECK(ex.architectures[1].arch == Architecture::AntennaSelection);
  CHECK(ex.architectures[1].mode == CombinerMode::MF);
  CHECK(ex.noise_figure(Architecture::SwitchHybrid) == 6.0);
  CHECK(ex.noise_figure(Architecture::PsHybrid) == 5.7);
  REQUIRE(rc.chain);
  CHECK(rc.chain->stages.size() == 2);
  CHECK(rc.chain->stages[0].nf_db == 1.5);
  CHECK(rc.chain->stages[1].label == "amp");
  CHECK(rc.output_path == "out.json");
  CHECK(rc.format == OutputFormat::Json);
}

TEST_CASE("empty document keeps defaults") {
  const auto rc = parse_run_config("{}", ExperimentKind::SnrRatioConvergence);
  const auto def = default_experiment_config(ExperimentKind::SnrRatioConvergence);
  CHECK(rc.experiment.n_list == def.n_list);
  CHECK(rc.experiment.nq_list == def.nq_list);
  CHECK(rc.experiment.n_trials == def.n_trials);
  CHECK(rc.output_path.empty());
  CHECK(rc.format == OutputFormat::Csv);
  CHECK_FALSE(rc.chain);
}

TEST_CASE("rejections name the field") {
  const auto k = ExperimentKind::RateVsSnr;
  CHECK_THROWS_WITH(parse_run_config(R"({"sytem": {}})", k), StartsWith("sytem: unknown key"));
  CHECK_THROWS_WITH(parse_run_config(R"({"run": {"trails": 3}})", k),
                    StartsWith("run.trails: unknown key"));
  CHECK_THROWS_WITH(parse_run_config(R"({"run": {"trials": "many"}})", k),
                    StartsWith("run.trials"));
  CHECK_THROWS_WITH(parse_run_config(R"({"run": {"trials": 0}})", k), StartsWith("run.trials"));
  CHECK_THROWS_WITH(parse_run_config(R"({"run": {"seed": -1}})", k), StartsWith("run.seed"));
  CHECK_THROWS_WITH(parse_run_config(R"({"system": {"N": 2.5}})", k), StartsWith("system.N"));
  CHECK_THROWS_WITH(parse_run_config(R"({"system": {"N": 2, "U": 3}})", k),
                    StartsWith("system.N"));
  CHECK_THROWS_WITH(parse_run_config(R"({"sweep": {"snr_db_list": [1, "x"]}})", k),
                    StartsWith("sweep.snr_db_list"));
  CHECK_THROWS_WITH(parse_run_config(R"({"architectures": [{"name": "lens", "combiner": "MF"}]})", k),
                    StartsWith("architectures[0].name"));
  CHECK_THROWS_WITH(parse_run_config(R"({"architectures": [{"name": "ps_hybrid", "combiner": "MMSE"}]})", k),
                    StartsWith("architectures[0].combiner"));
  CHECK_THROWS_WITH(parse_run_config(R"({"nf": {"mode": "fancy"}})", k), StartsWith("nf.mode"));
  CHECK_THROWS_WITH(parse_run_config(R"({"nf": {"chain": [{"stage": "balun"}]}})", k),
                    StartsWith("nf.chain[0].stage"));
  CHECK_THROWS_WITH(parse_run_config(R"({"nf": {"chain": [{"gain_db": 3}]}})", k),
                    StartsWith("nf.chain[0].nf_db"));
  CHECK_THROWS_WITH(parse_run_config(R"({"output": {"format": "xml"}})", k),
                    StartsWith("output.format"));
  CHECK_THROWS_WITH(parse_run_config("[1, 2]", k), StartsWith("config: top level"));
  CHECK_THROWS_AS(parse_run_config("{not json", k), ConfigError);
}

TEST_CASE("config files") {
  namespace fs = std::filesystem;
  const auto missing = (fs::temp_directory_path() / "swmimo_no_such_config.json").string();
  CHECK_THROWS_WITH(load_run_config(missing, ExperimentKind::RateVsSnr),
                    ContainsSubstring(missing));

  const auto path = fs::temp_directory_path() / "swmimo_config_test.json";
  {
    std::ofstream os(path);
    os << R"({"run": {"trials": 7}, "bogus": 1})";
  }
  CHECK_THROWS_WITH(load_run_config(path.string(), ExperimentKind::RateVsSnr),
                    ContainsSubstring(path.string()) && ContainsSubstring("bogus: unknown key"));
  {
    std::ofstream os(path);
    os << R"({"run": {"trials": 7}})";
  }
  CHECK(load_run_config(path.string(), ExperimentKind::RateVsSnr).experiment.n_trials == 7);
  fs::remove(path);
}
