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

#include "graphsann/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "graphsann/checkpoint.hpp"
#include "graphsann/dataset_io.hpp"
#include "graphsann/errors.hpp"
#include "graphsann/pipeline.hpp"
#include "graphsann/sbm.hpp"
#include "graphsann/split.hpp"

namespace graphsann {

using nlohmann::json;

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  if (values.size() < 2) return s;
  double sq = 0.0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(sq / static_cast<double>(values.size() - 1));
  return s;
}

Graph load_graph(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.dataset) return load_dataset(*cfg.dataset);
  return generate_sbm(cfg.sbm->spec());
}

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out = open_output(path);
  out << text;
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

void make_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

std::string pct(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", 100.0 * fraction);
  return buf;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& cfg, const Graph& g, const RunOptions& opts) {
  cfg.validate();
  if (!g.has_labels()) throw ContractError("experiments need a labeled graph");
  const auto t0 = std::chrono::steady_clock::now();
  const ImbalanceSpec spec = cfg.imbalance_for(g.num_classes());

  RunReport report;
  report.config = to_ini(cfg);
  report.edge_homophily = edge_homophily(g);
  report.node_homophily = node_homophily(g);
  report.class_histogram.assign(static_cast<std::size_t>(g.num_classes()), 0);
  for (int c : g.labels()) {
    if (c != kUnlabeled) ++report.class_histogram[c];
  }
  if (opts.epoch_log_dir) make_dir(*opts.epoch_log_dir);
  if (opts.checkpoint_dir) make_dir(*opts.checkpoint_dir);

  for (std::uint64_t seed : cfg.seed_list()) {
    const auto t_seed = std::chrono::steady_clock::now();
    Graph run_graph = g;
    std::mt19937_64 rng(seed);
    run_graph.set_masks(make_imbalanced_split(run_graph, spec, cfg.setting, cfg.eval, rng));
    HyperParams hp = cfg.hp;
    hp.seed = seed;

    std::ofstream log;
    if (opts.epoch_log_dir) {
      log = open_output(*opts.epoch_log_dir / ("epochs_seed" + std::to_string(seed) + ".csv"));
    }
    PipelineResult r = run_pipeline(run_graph, spec, hp, cfg.ablation, log.is_open() ? &log : nullptr);
    if (opts.checkpoint_dir) {
      std::vector<ad::Parameter*> params = r.encoder.parameters();
      for (ad::Parameter* p : r.classifier.parameters()) params.push_back(p);
      Checkpoint ckpt = snapshot_parameters(params, report.config + "seed = " + std::to_string(seed) + "\n");
      ckpt.arrays.push_back({"similarity_projection", r.projection});
      save_checkpoint(*opts.checkpoint_dir / ("checkpoint_seed" + std::to_string(seed) + ".bin"), ckpt);
    }
    report.runs.push_back({seed, r.test, r.best_epoch, r.epochs_run, seconds_since(t_seed)});
    if (opts.progress != nullptr) {
      *opts.progress << "seed " << seed << ": acc " << pct(r.test.accuracy) << " f1 "
                     << pct(r.test.macro_f1) << " auc " << pct(r.test.macro_auc) << " (best epoch "
                     << r.best_epoch << ", " << r.epochs_run << " epochs)" << std::endl;
    }
  }

  std::vector<double> acc, f1, auc;
  for (const SeedRun& s : report.runs) {
    acc.push_back(s.test.accuracy);
    f1.push_back(s.test.macro_f1);
    auc.push_back(s.test.macro_auc);
  }
  report.accuracy = summarize(acc);
  report.macro_f1 = summarize(f1);
  report.macro_auc = summarize(auc);
  report.seconds = seconds_since(t0);
  return report;
}

std::vector<SweepRow> sweep(const ExperimentConfig& cfg, const Graph& g, const std::string& key,
                            std::span<const std::string> values, const RunOptions& opts) {
  std::vector<SweepRow> rows;
  for (const std::string& value : values) {
    ExperimentConfig point = cfg;
    set_config_value(point, key, value);
    if (opts.progress != nullptr) *opts.progress << key << " = " << value << std::endl;
    RunOptions point_opts = opts;
    if (opts.epoch_log_dir) point_opts.epoch_log_dir = *opts.epoch_log_dir / (key + "=" + value);
    if (opts.checkpoint_dir) point_opts.checkpoint_dir = *opts.checkpoint_dir / (key + "=" + value);
    rows.push_back({key, value, run_experiment(point, g, point_opts)});
  }
  return rows;
}

std::vector<SweepRow> sweep_im_ratio(const ExperimentConfig& cfg, const Graph& g,
                                     const RunOptions& opts) {
  const std::vector<std::string> values = {"0.1", "0.2", "0.3", "0.4", "0.5", "0.6"};
  return sweep(cfg, g, "imbalance.im_ratio", values, opts);
}

std::vector<std::string> default_grid(const std::string& key) {
  if (key == "train.dropout") return {"0.1", "0.3", "0.5", "0.7", "0.9"};
  if (key == "extractor.xi") return {"0.01", "0.1", "0.3", "0.5", "0.7", "0.9"};
  if (key == "imbalance.im_ratio") return {"0.1", "0.2", "0.3", "0.4", "0.5", "0.6"};
  throw ConfigError("no default grid for '" + key + "'; pass the values explicitly");
}

std::vector<SweepRow> ablation_suite(const ExperimentConfig& cfg, const Graph& g,
                                     const RunOptions& opts) {
  const std::vector<std::string> values = {"full", "no-ufm", "no-ase", "no-mse"};
  std::vector<SweepRow> rows = sweep(cfg, g, "run.ablation", values, opts);
  for (SweepRow& row : rows) row.parameter = "ablation";
  return rows;
}

namespace {

json metrics_json(const MetricsReport& m) {
  return {{"count", m.count},         {"accuracy", m.accuracy}, {"macro_f1", m.macro_f1},
          {"macro_auc", m.macro_auc}, {"precision", m.precision}, {"recall", m.recall},
          {"f1", m.f1},               {"auc", m.auc},           {"auc_skipped", m.auc_skipped},
          {"confusion", m.confusion}};
}

MetricsReport metrics_from(const json& j) {
  MetricsReport m;
  j.at("count").get_to(m.count);
  j.at("accuracy").get_to(m.accuracy);
  j.at("macro_f1").get_to(m.macro_f1);
  j.at("macro_auc").get_to(m.macro_auc);
  j.at("precision").get_to(m.precision);
  j.at("recall").get_to(m.recall);
  j.at("f1").get_to(m.f1);
  j.at("auc").get_to(m.auc);
  m.auc_skipped = j.at("auc_skipped").get<std::vector<bool>>();
  j.at("confusion").get_to(m.confusion);
  return m;
}

json summary_json(const Summary& s) { return {{"mean", s.mean}, {"std", s.std}}; }

Summary summary_from(const json& j) { return {j.at("mean").get<double>(), j.at("std").get<double>()}; }

json report_json(const RunReport& r) {
  json runs = json::array();
  for (const SeedRun& s : r.runs) {
    runs.push_back({{"seed", s.seed},
                    {"test", metrics_json(s.test)},
                    {"best_epoch", s.best_epoch},
                    {"epochs_run", s.epochs_run},
                    {"seconds", s.seconds}});
  }
  return {{"config", r.config},
          {"runs", runs},
          {"accuracy", summary_json(r.accuracy)},
          {"macro_f1", summary_json(r.macro_f1)},
          {"macro_auc", summary_json(r.macro_auc)},
          {"edge_homophily", r.edge_homophily},
          {"node_homophily", r.node_homophily},
          {"class_histogram", r.class_histogram},
          {"seconds", r.seconds}};
}

RunReport report_from(const json& j) {
  RunReport r;
  j.at("config").get_to(r.config);
  for (const json& s : j.at("runs")) {
    r.runs.push_back({s.at("seed").get<std::uint64_t>(), metrics_from(s.at("test")),
                      s.at("best_epoch").get<int>(), s.at("epochs_run").get<int>(),
                      s.at("seconds").get<double>()});
  }
  r.accuracy = summary_from(j.at("accuracy"));
  r.macro_f1 = summary_from(j.at("macro_f1"));
  r.macro_auc = summary_from(j.at("macro_auc"));
  j.at("edge_homophily").get_to(r.edge_homophily);
  j.at("node_homophily").get_to(r.node_homophily);
  j.at("class_histogram").get_to(r.class_histogram);
  j.at("seconds").get_to(r.seconds);
  return r;
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw IngestionError(std::string("malformed report: ") + e.what());
  }
}

template <class F>
auto decode(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw IngestionError(std::string("malformed report: ") + e.what());
  }
}

const char* const kMetricsHeader = "seed,accuracy,macro_f1,macro_auc,best_epoch,epochs_run";

std::string metrics_line(const SeedRun& s) {
  return std::to_string(s.seed) + "," + pct(s.test.accuracy) + "," + pct(s.test.macro_f1) + "," +
         pct(s.test.macro_auc) + "," + std::to_string(s.best_epoch) + "," +
         std::to_string(s.epochs_run);
}

}  // namespace

std::string report_to_json(const RunReport& report) { return report_json(report).dump(2); }

RunReport report_from_json(const std::string& text) {
  const json j = parse_json(text);
  return decode([&] { return report_from(j); });
}

std::string sweep_to_json(std::span<const SweepRow> rows) {
  json out = json::array();
  for (const SweepRow& row : rows) {
    out.push_back({{"parameter", row.parameter}, {"value", row.value}, {"report", report_json(row.report)}});
  }
  return out.dump(2);
}

std::vector<SweepRow> sweep_from_json(const std::string& text) {
  const json j = parse_json(text);
  return decode([&] {
    std::vector<SweepRow> rows;
    for (const json& row : j) {
      rows.push_back({row.at("parameter").get<std::string>(), row.at("value").get<std::string>(),
                      report_from(row.at("report"))});
    }
    return rows;
  });
}

std::string metrics_csv(const RunReport& report) {
  std::string out = std::string(kMetricsHeader) + "\n";
  for (const SeedRun& s : report.runs) out += metrics_line(s) + "\n";
  return out;
}

std::string metrics_csv(std::span<const SweepRow> rows) {
  std::string out = std::string("parameter,value,") + kMetricsHeader + "\n";
  for (const SweepRow& row : rows) {
    for (const SeedRun& s : row.report.runs) out += row.parameter + "," + row.value + "," + metrics_line(s) + "\n";
  }
  return out;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::string out = "parameter,value,accuracy_mean,accuracy_std,macro_f1_mean,macro_f1_std,macro_auc_mean,macro_auc_std\n";
  for (const SweepRow& row : rows) {
    const RunReport& r = row.report;
    out += row.parameter + "," + row.value + "," + pct(r.accuracy.mean) + "," + pct(r.accuracy.std) + "," +
           pct(r.macro_f1.mean) + "," + pct(r.macro_f1.std) + "," + pct(r.macro_auc.mean) + "," +
           pct(r.macro_auc.std) + "\n";
  }
  return out;
}

std::string plot_columns(std::span<const SweepRow> rows) {
  std::ostringstream os;
  os << "# index value acc acc_std f1 f1_std auc auc_std";
  if (!rows.empty()) os << "  (" << rows.front().parameter << ")";
  os << "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const RunReport& r = rows[i].report;
    os << i << ' ' << rows[i].value << ' ' << pct(r.accuracy.mean) << ' ' << pct(r.accuracy.std) << ' '
       << pct(r.macro_f1.mean) << ' ' << pct(r.macro_f1.std) << ' ' << pct(r.macro_auc.mean) << ' '
       << pct(r.macro_auc.std) << '\n';
  }
  return os.str();
}

void emit_report(const RunReport& report, const std::filesystem::path& dir) {
  make_dir(dir);
  write_file(dir / "results.json", report_to_json(report) + "\n");
  write_file(dir / "metrics.csv", metrics_csv(report));
}

void emit_sweep(std::span<const SweepRow> rows, const std::filesystem::path& dir) {
  make_dir(dir);
  write_file(dir / "results.json", sweep_to_json(rows) + "\n");
  write_file(dir / "metrics.csv", metrics_csv(rows));
  write_file(dir / "sweep.csv", sweep_csv(rows));
}

}  // namespace graphsann
