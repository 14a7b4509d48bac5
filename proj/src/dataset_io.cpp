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

#include "graphsann/dataset_io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "graphsann/errors.hpp"

namespace graphsann {
namespace {

namespace fs = std::filesystem;

std::ifstream open_input(const fs::path& path) {
  if (!fs::exists(path)) throw IngestionError("missing dataset file " + path.string());
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot read dataset file " + path.string());
  return in;
}

[[noreturn]] void fail(const fs::path& path, int line, const std::string& what) {
  throw IngestionError(path.string() + ":" + std::to_string(line) + ": " + what);
}

std::string strip(std::string s) {
  if (const auto hash = s.find('#'); hash != std::string::npos) s.erase(hash);
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  return s.substr(first, s.find_last_not_of(" \t\r\n") - first + 1);
}

template <class T>
bool parse_field(std::string_view text, T& out) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return !text.empty() && ec == std::errc() && end == text.data() + text.size();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

ad::Matrix read_features(const fs::path& path) {
  std::ifstream in = open_input(path);
  std::vector<std::vector<double>> rows;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (strip(line).empty()) continue;
    std::vector<double> row;
    for (const std::string& field : split(line, ',')) {
      double v = 0.0;
      if (!parse_field(field, v)) fail(path, lineno, "not a number: '" + field + "'");
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(path, lineno, "expected " + std::to_string(rows.front().size()) + " columns, found " +
                             std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  const Eigen::Index d = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
  ad::Matrix x(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) x(static_cast<Eigen::Index>(i), j) = rows[i][j];
  }
  return x;
}

struct RawLabels {
  std::vector<std::string> names;  // per node; empty means unlabeled
  std::size_t rows = 0;
};

RawLabels read_labels(const fs::path& path, int n) {
  std::ifstream in = open_input(path);
  RawLabels out;
  out.names.assign(static_cast<std::size_t>(n), "");
  std::vector<bool> seen(static_cast<std::size_t>(n), false);
  std::string line;
  bool header = false;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const std::string body = strip(line);
    if (body.empty()) continue;
    const auto fields = split(body, ',');
    if (!header) {
      if (fields.size() != 2 || strip(fields[0]) != "node_id" || strip(fields[1]) != "class") {
        fail(path, lineno, "expected header 'node_id,class'");
      }
      header = true;
      continue;
    }
    if (fields.size() != 2) fail(path, lineno, "expected 'node_id,class'");
    int id = 0;
    if (!parse_field(fields[0], id)) fail(path, lineno, "bad node id '" + fields[0] + "'");
    ++out.rows;
    if (id < 0 || id >= n) {
      fail(path, lineno, "node id " + std::to_string(id) + " outside the " + std::to_string(n) +
                             " feature rows");
    }
    if (seen[id]) fail(path, lineno, "node " + std::to_string(id) + " labeled twice");
    seen[id] = true;
    const std::string name = strip(fields[1]);
    if (name.empty()) fail(path, lineno, "empty class");
    out.names[id] = name;
  }
  if (!header) fail(path, 1, "expected header 'node_id,class'");
  return out;
}

EdgeList read_edges(const fs::path& path, int n) {
  std::ifstream in = open_input(path);
  EdgeList edges;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    const std::string body = strip(line);
    if (body.empty()) continue;
    const auto fields = split(body, '\t');
    NodeId u = 0, v = 0;
    if (fields.size() != 2 || !parse_field(fields[0], u) || !parse_field(fields[1], v)) {
      fail(path, lineno, "expected 'src<TAB>dst'");
    }
    if (u < 0 || u >= n || v < 0 || v >= n) {
      fail(path, lineno, "endpoint outside [0, " + std::to_string(n) + ")");
    }
    edges.emplace_back(u, v);
  }
  return edges;
}

// Sorted class names; numeric order when every name is an integer.
std::vector<std::string> class_order(const std::vector<std::string>& names) {
  std::vector<std::string> classes;
  for (const std::string& s : names) {
    if (!s.empty()) classes.push_back(s);
  }
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  const bool numeric = std::all_of(classes.begin(), classes.end(), [](const std::string& s) {
    long long v = 0;
    return parse_field(s, v);
  });
  if (numeric) {
    std::sort(classes.begin(), classes.end(), [](const std::string& a, const std::string& b) {
      long long x = 0, y = 0;
      parse_field(a, x);
      parse_field(b, y);
      return x < y;
    });
  }
  return classes;
}

}  // namespace

Graph load_dataset(const fs::path& dir) {
  const ad::Matrix features = read_features(dir / "features.csv");
  const int n = static_cast<int>(features.rows());
  const RawLabels raw = read_labels(dir / "labels.csv", n);
  if (raw.rows != static_cast<std::size_t>(n)) {
    throw IngestionError((dir / "labels.csv").string() + ": " + std::to_string(raw.rows) +
                         " label rows for " + std::to_string(n) + " feature rows in " +
                         (dir / "features.csv").string());
  }
  const EdgeList edges = read_edges(dir / "edges.tsv", n);

  const std::vector<std::string> classes = class_order(raw.names);
  std::map<std::string, int> dense;
  for (std::size_t c = 0; c < classes.size(); ++c) dense[classes[c]] = static_cast<int>(c);
  std::vector<int> labels(static_cast<std::size_t>(n), kUnlabeled);
  for (int u = 0; u < n; ++u) {
    if (!raw.names[u].empty()) labels[u] = dense.at(raw.names[u]);
  }
  Graph g = Graph::from_edge_list(edges, n, features, std::move(labels));
  g.set_class_names(classes);
  return g;
}

void save_dataset(const Graph& g, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  auto open = [](const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out.precision(17);
    return out;
  };

  std::ofstream edges = open(dir / "edges.tsv");
  for (const auto& [u, v] : g.to_edge_list()) edges << u << '\t' << v << '\n';

  std::ofstream features = open(dir / "features.csv");
  for (Eigen::Index i = 0; i < g.features().rows(); ++i) {
    for (Eigen::Index j = 0; j < g.features().cols(); ++j) {
      features << (j > 0 ? "," : "") << g.features()(i, j);
    }
    features << '\n';
  }

  std::ofstream labels = open(dir / "labels.csv");
  labels << "node_id,class\n";
  const auto& names = g.class_names();
  for (NodeId u = 0; u < g.num_nodes() && g.has_labels(); ++u) {
    const int c = g.label(u);
    if (c == kUnlabeled) continue;
    labels << u << ',' << (names.empty() ? std::to_string(c) : names[c]) << '\n';
  }
  for (std::ofstream* f : {&edges, &features, &labels}) {
    f->flush();
    if (!*f) throw IoError("write failed under " + dir.string());
  }
}

}  // namespace graphsann
