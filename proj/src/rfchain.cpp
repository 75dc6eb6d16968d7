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

#include "swmimo/rfchain.hpp"

#include <cmath>

#include "swmimo/errors.hpp"

namespace swmimo {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

double friis_composite_nf(const NoiseStageChain& chain) {
  if (chain.stages.empty()) throw InvalidParameter("friis_composite_nf: empty stage chain");
  double factor = 0;
  double gain = 1;
  for (std::size_t k = 0; k < chain.stages.size(); ++k) {
    const auto& st = chain.stages[k];
    if (!(st.nf_db >= 0))
      throw InvalidParameter("stage '" + st.label + "': nf_db must be >= 0");
    const double f = db_to_linear(st.nf_db);
    factor += k == 0 ? f : (f - 1) / gain;
    gain *= db_to_linear(st.gain_db);
  }
  return linear_to_db(factor);
}

const char* to_string(Architecture arch) {
  switch (arch) {
    case Architecture::FullyDigital: return "fully_digital";
    case Architecture::AntennaSelection: return "antenna_selection";
    case Architecture::PsHybrid: return "ps_hybrid";
    case Architecture::SwitchHybrid: return "switch_hybrid";
  }
  return "unknown";
}

Architecture parse_architecture(const std::string& tag) {
  for (auto a : {Architecture::FullyDigital, Architecture::AntennaSelection,
                 Architecture::PsHybrid, Architecture::SwitchHybrid})
    if (tag == to_string(a)) return a;
  throw InvalidParameter("unknown architecture '" + tag + "'");
}

double preset_nf(Architecture arch) {
  switch (arch) {
    case Architecture::FullyDigital: return 5.1;
    case Architecture::AntennaSelection: return 5.1;
    case Architecture::PsHybrid: return 5.7;
    case Architecture::SwitchHybrid: return 7.2;
  }
  throw InvalidParameter("preset_nf: unknown architecture");
}

const std::map<std::string, RfStage>& example_stage_catalog() {
  static const std::map<std::string, RfStage> catalog = {
      {"lna", {"lna", 22.0, 5.0}},
      {"mixer", {"mixer", 0.0, 12.0}},
      {"combiner", {"combiner", -1.0, 1.0}},
      {"divider", {"divider", -1.0, 1.0}},
      {"switch", {"switch", -1.5, 1.5}},
      {"phase_shifter", {"phase_shifter", -4.0, 4.0}},
      {"vga", {"vga", 4.0, 4.0}},
  };
  return catalog;
}

}  // namespace swmimo
