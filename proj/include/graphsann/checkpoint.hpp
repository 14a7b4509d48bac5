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

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "graphsann/autodiff.hpp"

namespace graphsann {

struct NamedArray {
  std::string name;
  ad::Matrix value;
};

struct Checkpoint {
  std::string hyperparameters;  // free-form text block
  std::vector<NamedArray> arrays;
};

// Layout, all integers little-endian u64:
//   "GSANNCK1" | len | hyperparameter text | count |
//   count x (len | name | rows | cols | rows*cols float64, row-major)
/// Throws IoError when the file cannot be written.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
/// Throws IngestionError on a bad magic, truncated file or absurd sizes.
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Copies arrays into parameters of the same name; throws ContractError on a
/// missing name or shape mismatch.
void restore_parameters(const Checkpoint& ckpt, std::span<ad::Parameter* const> params);
Checkpoint snapshot_parameters(std::span<ad::Parameter* const> params, std::string hyperparameters);

}  // namespace graphsann
