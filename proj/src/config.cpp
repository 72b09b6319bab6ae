// Copyright 2026 The bandloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bandloc/config.hpp"

#include <json.hpp>

#include <cstdlib>
#include <set>
#include <thread>

namespace bandloc::cli {

using nlohmann::json;

std::string experiment_name(Experiment e) {
  switch (e) {
    case Experiment::Decay: return "decay";
    case Experiment::Apriori: return "apriori";
    case Experiment::JacobianVerify: return "jacobian-verify";
    case Experiment::ShiftVerify: return "shift-verify";
    case Experiment::Events: return "events";
    case Experiment::Correlator: return "correlator";
    case Experiment::LemmaCheck: return "lemma-check";
  }
  throw ConfigError("unknown experiment");
}

Experiment experiment_from_name(const std::string& name) {
  if (name == "decay") return Experiment::Decay;
  if (name == "apriori") return Experiment::Apriori;
  if (name == "jacobian-verify") return Experiment::JacobianVerify;
  if (name == "shift-verify") return Experiment::ShiftVerify;
  if (name == "events") return Experiment::Events;
  if (name == "correlator") return Experiment::Correlator;
  if (name == "lemma-check") return Experiment::LemmaCheck;
  throw ConfigError("unknown experiment: " + name);
}

std::vector<std::string> ExperimentConfig::validate() const {
  if (!(s > 0.0) || !(s < 1.0)) throw ConfigError("s must lie in (0, 1)");
  if (!(r > 0.0) || !(r < s)) throw ConfigError("r must lie in (0, s)");
  if (!(q > 0.0) || !(q < 1.0)) throw ConfigError("q must lie in (0, 1)");
  if (!(phi_fraction > 0.0) || !(phi_fraction < 1.0 / 6.0))
    throw ConfigError("phi_fraction must lie in (0, 1/6)");
  if (sharp < 3) throw ConfigError("sharp must be >= 3");
  if (cutoff_k < 15.0 / 8.0) throw ConfigError("cutoff_K must be >= 15/8 for |phi'| <= 1");
  if (n_samples < 1) throw ConfigError("n_samples must be positive");
  if (trials < 1) throw ConfigError("trials must be positive");
  if (!(c_norm > 0.0) || !(c_norm * c_norm < k_event))
    throw ConfigError("need 0 < c_norm < sqrt(k_event)");
  for (std::size_t i = 1; i < distances.size(); ++i)
    if (distances[i] <= distances[i - 1]) throw ConfigError("distances must be increasing");
  for (std::size_t i = 1; i < n_list.size(); ++i)
    if (n_list[i] <= n_list[i - 1]) throw ConfigError("n_list must be increasing");
  return model.validate();
}

namespace {

json parse_strict_json(const std::string& text) {
  std::vector<std::set<std::string>> key_stack;
  std::string duplicate;
  json::parser_callback_t cb = [&](int /*depth*/, json::parse_event_t event, json& parsed) {
    switch (event) {
      case json::parse_event_t::object_start:
        key_stack.emplace_back();
        break;
      case json::parse_event_t::object_end:
        key_stack.pop_back();
        break;
      case json::parse_event_t::key: {
        const std::string key = parsed.get<std::string>();
        if (!key_stack.back().insert(key).second && duplicate.empty()) duplicate = key;
        break;
      }
      default:
        break;
    }
    return true;
  };
  json doc;
  try {
    doc = json::parse(text, cb);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config syntax error: ") + e.what());
  }
  if (!duplicate.empty()) throw ConfigError("duplicate key: " + duplicate);
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  return doc;
}

double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("key '" + key + "' must be a number");
  return v.get<double>();
}

int as_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw ConfigError("key '" + key + "' must be an integer");
  return v.get<int>();
}

std::string as_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError("key '" + key + "' must be a string");
  return v.get<std::string>();
}

std::vector<int> as_int_list(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError("key '" + key + "' must be an array of integers");
  std::vector<int> out;
  for (const auto& item : v) out.push_back(as_int(item, key));
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, Experiment experiment) {
  const json doc = parse_strict_json(text);
  ExperimentConfig cfg;
  cfg.experiment = experiment;

  bool have_pairs = false;
  for (const auto& [key, value] : doc.items()) {
    if (key == "experiment") {
      const Experiment named = experiment_from_name(as_string(value, key));
      if (named != experiment)
        throw ConfigError("config experiment '" + experiment_name(named) +
                          "' does not match the requested '" + experiment_name(experiment) + "'");
    } else if (key == "W") {
      cfg.model.w = as_int(value, key);
    } else if (key == "n") {
      cfg.model.n = as_int(value, key);
    } else if (key == "z") {
      cfg.model.z = as_number(value, key);
    } else if (key == "ensemble") {
      cfg.model.ensemble = ensembles::ensemble_from_name(as_string(value, key));
    } else if (key == "energy_cap_coeff") {
      cfg.model.energy_cap_coeff = as_number(value, key);
    } else if (key == "mixture_support") {
      if (!cfg.model.mixture) cfg.model.mixture.emplace();
      cfg.model.mixture->support_bound = as_number(value, key);
    } else if (key == "mixture_atoms") {
      if (!value.is_array()) throw ConfigError("key 'mixture_atoms' must be [[lambda, weight], ...]");
      if (!cfg.model.mixture) cfg.model.mixture.emplace();
      for (const auto& atom : value) {
        if (!atom.is_array() || atom.size() != 2)
          throw ConfigError("key 'mixture_atoms' must be [[lambda, weight], ...]");
        cfg.model.mixture->atoms.emplace_back(as_number(atom[0], key), as_number(atom[1], key));
      }
    } else if (key == "s") {
      cfg.s = as_number(value, key);
    } else if (key == "r") {
      cfg.r = as_number(value, key);
    } else if (key == "q") {
      cfg.q = as_number(value, key);
    } else if (key == "distances") {
      cfg.distances = as_int_list(value, key);
    } else if (key == "n_list") {
      cfg.n_list = as_int_list(value, key);
    } else if (key == "pairs") {
      if (!value.is_array()) throw ConfigError("key 'pairs' must be [[i, j], ...]");
      for (const auto& p : value) {
        if (!p.is_array() || p.size() != 2) throw ConfigError("key 'pairs' must be [[i, j], ...]");
        cfg.pairs.emplace_back(as_int(p[0], key), as_int(p[1], key));
      }
      have_pairs = true;
    } else if (key == "n_samples") {
      if (!value.is_number_integer()) throw ConfigError("key 'n_samples' must be an integer");
      cfg.n_samples = value.get<std::int64_t>();
    } else if (key == "trials") {
      cfg.trials = as_int(value, key);
    } else if (key == "seed") {
      if (!value.is_number_integer()) throw ConfigError("key 'seed' must be an integer");
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "threads") {
      cfg.threads = as_int(value, key);
    } else if (key == "cutoff_K") {
      cfg.cutoff_k = as_number(value, key);
    } else if (key == "phi_fraction") {
      cfg.phi_fraction = as_number(value, key);
    } else if (key == "sharp") {
      cfg.sharp = as_int(value, key);
    } else if (key == "delta") {
      cfg.delta = as_number(value, key);
    } else if (key == "c_norm") {
      cfg.c_norm = as_number(value, key);
    } else if (key == "k_event") {
      cfg.k_event = as_number(value, key);
    } else if (key == "dense_cap") {
      cfg.dense_cap = as_int(value, key);
    } else if (key == "out_dir") {
      cfg.out_dir = as_string(value, key);
    } else {
      throw ConfigError("unknown key: " + key);
    }
  }

  if (cfg.experiment == Experiment::Correlator && !have_pairs) {
    cfg.pairs = {{1, 8}, {1, 64}};
  }
  cfg.validate();
  return cfg;
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("BANDLOC_THREADS")) {
    const int parsed = std::atoi(env);
    if (parsed > 0) return parsed;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

}  // namespace bandloc::cli
