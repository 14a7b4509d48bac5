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

#include "graphsann/graph.hpp"

namespace graphsann {

/**
 * Reads a dataset directory:
 *
 *   edges.tsv     "src<TAB>dst" per line, 0-based, '#' starts a comment
 *   features.csv  row i holds the features of node i, no header
 *   labels.csv    header "node_id,class", one row per node
 *
 * Class names are remapped to dense ids in sorted order (numeric when every
 * name is an integer) and kept as the graph's class names. Throws IngestionError
 * naming the file (and line) on missing files, malformed rows, out-of-range
 * ids or a features/labels row-count mismatch.
 */
Graph load_dataset(const std::filesystem::path& dir);

/// Writes the three files above; class names default to the dense ids.
/// Throws IoError when a file cannot be written.
void save_dataset(const Graph& g, const std::filesystem::path& dir);

}  // namespace graphsann
