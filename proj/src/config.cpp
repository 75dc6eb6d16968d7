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

#include "swmimo/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace swmimo {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where, std::set<std::string> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key))
      throw ConfigError((where.empty() ? key : where + "." + key) + ": unknown key");
}

template <typename T>
T get_as(const json& obj, const std::string& key, const std::string& field) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(field + ": " + e.what());
  }
}

Index get_count(const json& obj, const std::string& key, const std::string& field) {
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(field + ": expected an integer");
  return v.get<Index>();
}

double get_number(const json& v, const std::string& field) {
  if (!v.is_number()) throw ConfigError(field + ": expected a number");
  return v.get<double>();
}

std::vector<Index> get_count_list(const json& obj, const std::string& key, const std::string& field) {
  const auto& v = obj.at(key);
  if (!v.is_array()) throw ConfigError(field + ": expected an array");
  std::vector<Index> out;
  for (const auto& e : v) {
    if (!e.is_number_integer()) throw ConfigError(field + ": entries must be integers");
    out.push_back(e.get<Index>());
  }
  return out;
}

CombinerMode parse_mode(const std::string& s, const std::string& field) {
  if (s == "MF" || s == "mf") return CombinerMode::MF;
  if (s == "ZF" || s == "zf") return CombinerMode::ZF;
  throw ConfigError(field + ": combiner must be MF or ZF, got '" + s + "'");
}

RfStage parse_stage(const json& st, const std::string& field) {
  if (st.contains("stage")) {
    reject_unknown(st, field, {"stage"});
    const auto name = get_as<std::string>(st, "stage", field + ".stage");
    const auto& cat = example_stage_catalog();
    auto it = cat.find(name);
    if (it == cat.end()) throw ConfigError(field + ".stage: unknown catalog stage '" + name + "'");
    return it->second;
  }
  reject_unknown(st, field, {"label", "gain_db", "nf_db"});
  RfStage s;
  if (st.contains("label")) s.label = get_as<std::string>(st, "label", field + ".label");
  if (!st.contains("nf_db")) throw ConfigError(field + ".nf_db: required");
  s.gain_db = st.contains("gain_db") ? get_number(st.at("gain_db"), field + ".gain_db") : 0.0;
  s.nf_db = get_number(st.at("nf_db"), field + ".nf_db");
  if (!(s.nf_db >= 0)) throw ConfigError(field + ".nf_db: must be >= 0");
  return s;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text, ExperimentKind kind) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  RunConfig rc;
  rc.experiment = default_experiment_config(kind);
  auto& ex = rc.experiment;
  if (!doc.is_object()) throw ConfigError("config: top level must be an object");
  reject_unknown(doc, "", {"system", "sweep", "run", "architectures", "nf", "output"});

  if (doc.contains("system")) {
    const auto& s = doc["system"];
    reject_unknown(s, "system", {"N", "U", "NRF", "NQ"});
    if (s.contains("N")) ex.system.n_antennas = get_count(s, "N", "system.N");
    if (s.contains("U")) ex.system.n_users = get_count(s, "U", "system.U");
    if (s.contains("NQ")) ex.system.n_quant_phases = get_count(s, "NQ", "system.NQ");
    if (s.contains("NRF"))
      ex.system.n_rf_chains = get_count(s, "NRF", "system.NRF");
    else
      ex.system.n_rf_chains = std::max(ex.system.n_rf_chains, ex.system.n_users);
  }
  if (doc.contains("sweep")) {
    const auto& s = doc["sweep"];
    reject_unknown(s, "sweep", {"n_list", "snr_db_list", "nq_list"});
    if (s.contains("n_list")) ex.n_list = get_count_list(s, "n_list", "sweep.n_list");
    if (s.contains("nq_list")) ex.nq_list = get_count_list(s, "nq_list", "sweep.nq_list");
    if (s.contains("snr_db_list")) {
      const auto& v = s["snr_db_list"];
      if (!v.is_array()) throw ConfigError("sweep.snr_db_list: expected an array");
      ex.snr_db_list.clear();
      for (const auto& e : v) ex.snr_db_list.push_back(get_number(e, "sweep.snr_db_list"));
    }
  }
  if (doc.contains("run")) {
    const auto& s = doc["run"];
    reject_unknown(s, "run", {"trials", "seed", "threads"});
    if (s.contains("trials")) {
      const Index t = get_count(s, "trials", "run.trials");
      if (t < 1) throw ConfigError("run.trials: must be >= 1");
      ex.n_trials = static_cast<std::size_t>(t);
    }
    if (s.contains("seed")) {
      if (!s["seed"].is_number_unsigned()) throw ConfigError("run.seed: expected a nonnegative integer");
      ex.system.rng_seed = s["seed"].get<std::uint64_t>();
    }
    if (s.contains("threads")) {
      const Index t = get_count(s, "threads", "run.threads");
      if (t < 1) throw ConfigError("run.threads: must be >= 1");
      ex.threads = static_cast<unsigned>(t);
    }
  }
  if (doc.contains("architectures")) {
    const auto& a = doc["architectures"];
    if (!a.is_array()) throw ConfigError("architectures: expected an array");
    ex.architectures.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
      const std::string field = "architectures[" + std::to_string(i) + "]";
      reject_unknown(a[i], field, {"name", "combiner"});
      ArchitectureSpec spec;
      try {
        spec.arch = parse_architecture(get_as<std::string>(a[i], "name", field + ".name"));
      } catch (const ConfigError&) {
        throw;
      } catch (const InvalidParameter& e) {
        throw ConfigError(field + ".name: " + e.what());
      }
      spec.mode = parse_mode(get_as<std::string>(a[i], "combiner", field + ".combiner"),
                             field + ".combiner");
      ex.architectures.push_back(spec);
    }
  }
  if (doc.contains("nf")) {
    const auto& s = doc["nf"];
    reject_unknown(s, "nf", {"mode", "presets", "chain"});
    if (s.contains("mode")) {
      const auto mode = get_as<std::string>(s, "mode", "nf.mode");
      if (mode == "none")
        ex.nf_mode = NfMode::None;
      else if (mode == "preset")
        ex.nf_mode = NfMode::Preset;
      else
        throw ConfigError("nf.mode: must be 'none' or 'preset', got '" + mode + "'");
    }
    if (s.contains("presets")) {
      const auto& p = s["presets"];
      if (!p.is_object()) throw ConfigError("nf.presets: expected an object");
      for (const auto& [key, value] : p.items()) {
        Architecture arch;
        try {
          arch = parse_architecture(key);
        } catch (const InvalidParameter&) {
          throw ConfigError("nf.presets." + key + ": unknown architecture");
        }
        ex.nf_overrides[arch] = get_number(value, "nf.presets." + key);
      }
    }
    if (s.contains("chain")) {
      const auto& c = s["chain"];
      if (!c.is_array() || c.empty()) throw ConfigError("nf.chain: expected a nonempty array");
      NoiseStageChain chain;
      for (std::size_t i = 0; i < c.size(); ++i)
        chain.stages.push_back(parse_stage(c[i], "nf.chain[" + std::to_string(i) + "]"));
      rc.chain = std::move(chain);
    }
  }
  if (doc.contains("output")) {
    const auto& s = doc["output"];
    reject_unknown(s, "output", {"path", "format"});
    if (s.contains("path")) rc.output_path = get_as<std::string>(s, "path", "output.path");
    if (s.contains("format")) {
      const auto f = get_as<std::string>(s, "format", "output.format");
      if (f == "csv")
        rc.format = OutputFormat::Csv;
      else if (f == "json")
        rc.format = OutputFormat::Json;
      else
        throw ConfigError("output.format: must be 'csv' or 'json', got '" + f + "'");
    }
  }

  try {
    ex.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidParameter& e) {
    throw ConfigError(e.what());
  }
  return rc;
}

RunConfig load_run_config(const std::string& path, ExperimentKind kind) {
  std::ifstream is(path);
  if (!is) throw ConfigError("config file '" + path + "' cannot be opened");
  std::ostringstream ss;
  ss << is.rdbuf();
  try {
    return parse_run_config(ss.str(), kind);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace swmimo
