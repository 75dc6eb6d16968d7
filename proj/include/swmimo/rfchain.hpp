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

#include <map>
#include <string>
#include <vector>

namespace swmimo {

double db_to_linear(double db);
double linear_to_db(double linear);

/// A two-port RF stage.
struct RfStage {
  std::string label;
  double gain_db = 0;
  double nf_db = 0;
};

/// Ordered cascade of RF stages, antenna side first.
struct NoiseStageChain {
  std::vector<RfStage> stages;
};

/// Composite noise figure of a cascade by the Friis formula,
/// F = F1 + sum_k (F_k - 1) / (G_1 ... G_{k-1}), returned in dB.
double friis_composite_nf(const NoiseStageChain& chain);

enum class Architecture { FullyDigital, AntennaSelection, PsHybrid, SwitchHybrid };

const char* to_string(Architecture arch);
Architecture parse_architecture(const std::string& tag);

/// Composite receiver noise figure (dB) assumed for each architecture:
/// fully digital and antenna selection 5.1, phase-shifter hybrid 5.7,
/// switch hybrid 7.2.
double preset_nf(Architecture arch);

/// SNR after the receiver noise figure, in dB.
inline double apply_nf_penalty(double snr_db, double nf_db) { return snr_db - nf_db; }

/// Building blocks for exploring cascades at 2-5 GHz. Passive stages
/// (combiner, divider, switch, phase shifter) have gain equal to minus their
/// noise figure; the mixer is taken as 0 dB gain.
const std::map<std::string, RfStage>& example_stage_catalog();

}  // namespace swmimo
