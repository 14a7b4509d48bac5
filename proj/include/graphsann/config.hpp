/*
 * Copyright 2026 The GraphSANN Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "graphsann/pipeline.hpp"
#include "graphsann/sbm.hpp"
#include "graphsann/split.hpp"

namespace graphsann {

// Inline SBM description; the per-class means are derived from feature_dim
// and separation so that a config file stays short.
struct SbmSettings {
  std::vector<int> sizes = {100, 100, 10};
  double p_intra = 0.1;
  double p_inter = 0.01;
  int feature_dim = 16;
  double separation = 3.0;
  double noise_std = 1.0;
  std::uint64_t graph_seed = 0;

  SbmSpec spec() const;
};

struct ExperimentConfig {
  std::optional<std::filesystem::path> dataset;
  std::optional<SbmSettings> sbm;

  SplitSetting setting = SplitSetting::kSemiSupervised;
  EvalSplit eval;
  ImbalanceSpec imbalance;
  // Used when imbalance.minority_classes is empty: the highest class ids.
  int minority_count = 1;

  HyperParams hp;
  Ablation ablation = Ablation::kFull;
  int repeat = 1;
  std::vector<std::uint64_t> seeds;  // empty: 0 .. repeat-1
  std::filesystem::path output_dir = "results";

  void validate() const;
  std::vector<std::uint64_t> seed_list() const;
  /// Explicit minority classes, or the top `minority_count` ids of `num_classes`.
  ImbalanceSpec imbalance_for(int num_classes) const;
};

/// One configurable key, "section.name", with its reader and writer.
struct ConfigKey {
  std::string section;
  std::string name;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  // Empty when the key does not apply (e.g. sbm keys without an sbm section).
  std::function<std::string(const ExperimentConfig&)> get;

  std::string path() const { return section + "." + name; }
};

const std::vector<ConfigKey>& config_keys();

/// Sets one key given as "section.name". Throws ConfigError on an unknown key
/// or a malformed value, naming the key.
void set_config_value(ExperimentConfig& cfg, const std::string& path, const std::string& value);

/**
 * Parses the sectioned key=value format:
 *
 *   [train]
 *   learning_rate = 0.01
 *   hidden = 64,32
 *
 * Absent keys keep their defaults. Throws ConfigError naming the key path for
 * unknown keys, malformed values and (when `validate`) invariant violations.
 */
ExperimentConfig parse_config(std::istream& in, bool validate = true);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Writes every applicable key; parse_config(to_ini(c)) reproduces c.
std::string to_ini(const ExperimentConfig& cfg);

}  // namespace graphsann
