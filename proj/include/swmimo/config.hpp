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

#include <optional>
#include <string>

#include "swmimo/experiments.hpp"
#include "swmimo/rfchain.hpp"

namespace swmimo {

/// Configuration or validation problem; the message names the field.
class ConfigError : public InvalidParameter {
 public:
  using InvalidParameter::InvalidParameter;
};

enum class OutputFormat { Csv, Json };

/// Everything one CLI run needs, parsed from a JSON document of the form
///
///   {
///     "system": {"N": 64, "U": 3, "NRF": 3, "NQ": 4},
///     "sweep": {"n_list": [...], "snr_db_list": [...], "nq_list": [...]},
///     "run": {"trials": 500, "seed": 1, "threads": 4},
///     "architectures": [{"name": "switch_hybrid", "combiner": "ZF"}, ...],
///     "nf": {"mode": "preset", "presets": {"switch_hybrid": 7.2},
///            "chain": [{"stage": "lna"}, {"label": "mix", "gain_db": 0, "nf_db": 12}]},
///     "output": {"path": "out.csv", "format": "csv"}
///   }
///
/// Every section is optional and falls back to the experiment's defaults.
/// Unknown keys are rejected.
struct RunConfig {
  ExperimentConfig experiment;
  std::optional<NoiseStageChain> chain;
  std::string output_path;  // empty: standard output
  OutputFormat format = OutputFormat::Csv;
};

RunConfig parse_run_config(const std::string& json_text, ExperimentKind kind);

/// Reads and parses `path`; a missing or unreadable file is a ConfigError
/// naming the path.
RunConfig load_run_config(const std::string& path, ExperimentKind kind);

}  // namespace swmimo
