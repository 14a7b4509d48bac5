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

// graphsann: command-line front end for training runs, sweeps and dataset tools.
//
// Exit codes: 0 success, 1 configuration error, 2 ingestion error,
// 3 training aborted on non-finite values, 4 I/O error, 5 internal error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "graphsann/config.hpp"
#include "graphsann/dataset_io.hpp"
#include "graphsann/errors.hpp"
#include "graphsann/experiment.hpp"

namespace fs = std::filesystem;
using namespace graphsann;

namespace {

constexpr const char* kOutputDirEnv = "GRAPHSANN_OUTPUT_DIR";

// Config file plus per-key flag overrides shared by the experiment commands.
struct ConfigOptions {
  std::string config_file;
  std::string output_dir;
  std::vector<std::string> sets;
  std::map<std::string, std::string> values;  // key path -> flag value
  std::vector<std::pair<std::string, CLI::Option*>> flags;
};

std::string flag_name(const std::string& name) {
  std::string out = name;
  for (char& c : out) {
    if (c == '_') c = '-';
  }
  return "--" + out;
}

void add_config_options(CLI::App* cmd, ConfigOptions& o, bool with_output = true) {
  cmd->add_option("-c,--config", o.config_file, "Experiment config file")->check(CLI::ExistingFile);
  if (with_output) {
    cmd->add_option("-o,--output-dir", o.output_dir,
                    std::string("Output directory (overrides run.output_dir and $") + kOutputDirEnv + ")");
  }
  cmd->add_option("--set", o.sets, "Override any config key: section.name=value");
  for (const ConfigKey& key : config_keys()) {
    if (key.path() == "run.output_dir") continue;
    std::string flag = flag_name(key.name);
    if (key.path() == "data.path") flag = "--dataset," + flag;
    CLI::Option* opt = cmd->add_option(flag, o.values[key.path()], key.path())->group("Config keys");
    o.flags.emplace_back(key.path(), opt);
  }
}

ExperimentConfig resolve(const ConfigOptions& o, bool require_source = true) {
  ExperimentConfig cfg;
  if (!o.config_file.empty()) {
    std::ifstream in(o.config_file);
    if (!in) throw ConfigError("cannot open config file " + o.config_file);
    cfg = parse_config(in, false);
  }
  for (const auto& [path, opt] : o.flags) {
    if (opt->count() > 0) set_config_value(cfg, path, o.values.at(path));
  }
  for (const std::string& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects section.name=value, got '" + s + "'");
    set_config_value(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') cfg.output_dir = env;
  if (!o.output_dir.empty()) cfg.output_dir = o.output_dir;
  if (require_source) cfg.validate();
  return cfg;
}

void print_stats(const Graph& g, std::ostream& os) {
  os << "nodes " << g.num_nodes() << "  edges " << g.num_edges() << "  features " << g.feature_dim()
     << "  classes " << g.num_classes() << "\n";
  if (!g.has_labels()) return;
  char buf[64];
  std::snprintf(buf, sizeof buf, "H_node %.4f  H_edge %.4f", node_homophily(g), edge_homophily(g));
  os << buf << "\n";
  std::vector<int> histogram(static_cast<std::size_t>(g.num_classes()), 0);
  for (int c : g.labels()) {
    if (c != kUnlabeled) ++histogram[c];
  }
  os << "class histogram:\n";
  for (int c = 0; c < g.num_classes(); ++c) {
    os << "  " << c;
    if (!g.class_names().empty()) os << " (" << g.class_names()[c] << ")";
    os << ": " << histogram[c] << "\n";
  }
}

void print_summary(const std::string& label, const RunReport& r) {
  std::printf("%sACC %.2f ± %.2f  F1 %.2f ± %.2f  AUC %.2f ± %.2f  (%zu seeds, %.1f s)\n", label.c_str(),
              100 * r.accuracy.mean, 100 * r.accuracy.std, 100 * r.macro_f1.mean, 100 * r.macro_f1.std,
              100 * r.macro_auc.mean, 100 * r.macro_auc.std, r.runs.size(), r.seconds);
}

RunOptions run_options(const ExperimentConfig& cfg) {
  return RunOptions{.progress = &std::cerr,
                    .epoch_log_dir = cfg.output_dir / "epochs",
                    .checkpoint_dir = cfg.output_dir / "checkpoints"};
}

int cmd_run(const ConfigOptions& o) {
  const ExperimentConfig cfg = resolve(o);
  const Graph g = load_graph(cfg);
  print_stats(g, std::cerr);
  const RunReport report = run_experiment(cfg, g, run_options(cfg));
  emit_report(report, cfg.output_dir);
  print_summary("", report);
  std::cout << "wrote " << (cfg.output_dir / "results.json").string() << "\n";
  return 0;
}

int finish_sweep(const ExperimentConfig& cfg, const std::vector<SweepRow>& rows) {
  emit_sweep(rows, cfg.output_dir);
  for (const SweepRow& row : rows) print_summary(row.parameter + "=" + row.value + "  ", row.report);
  std::cout << "wrote " << (cfg.output_dir / "sweep.csv").string() << "\n";
  return 0;
}

int cmd_sweep_imratio(const ConfigOptions& o) {
  const ExperimentConfig cfg = resolve(o);
  const Graph g = load_graph(cfg);
  return finish_sweep(cfg, sweep_im_ratio(cfg, g, run_options(cfg)));
}

int cmd_sweep_hparam(const ConfigOptions& o, const std::string& param, const std::vector<std::string>& values) {
  const ExperimentConfig cfg = resolve(o);
  std::string key = param;
  if (key.find('.') == std::string::npos) {
    for (const ConfigKey& k : config_keys()) {
      if (k.name == param) key = k.path();
    }
  }
  const std::vector<std::string> grid = values.empty() ? default_grid(key) : values;
  const Graph g = load_graph(cfg);
  return finish_sweep(cfg, sweep(cfg, g, key, grid, run_options(cfg)));
}

int cmd_ablate(const ConfigOptions& o) {
  const ExperimentConfig cfg = resolve(o);
  const Graph g = load_graph(cfg);
  return finish_sweep(cfg, ablation_suite(cfg, g, run_options(cfg)));
}

int cmd_gen_sbm(const ConfigOptions& o, const std::string& out) {
  ExperimentConfig cfg = resolve(o, false);
  if (!cfg.sbm) cfg.sbm.emplace();
  const SbmSpec spec = cfg.sbm->spec();
  spec.validate();
  const Graph g = generate_sbm(spec);
  save_dataset(g, out);
  print_stats(g, std::cout);
  std::cout << "wrote " << out << "\n";
  return 0;
}

int cmd_stats(const ConfigOptions& o) {
  ExperimentConfig cfg = resolve(o, false);
  if (!cfg.dataset && !cfg.sbm) throw ConfigError("stats needs --dataset, --config or sbm flags");
  print_stats(load_graph(cfg), std::cout);
  return 0;
}

int cmd_plot_data(const std::string& input) {
  fs::path path = input;
  if (fs::is_directory(path)) path /= "results.json";
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  std::cout << plot_columns(sweep_from_json(text.str()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GraphSANN imbalanced node classification"};
  app.require_subcommand(1);

  ConfigOptions run_opts, imratio_opts, hparam_opts, ablate_opts, sbm_opts, stats_opts;
  CLI::App* run = app.add_subcommand("run", "Train and evaluate over the configured seeds");
  add_config_options(run, run_opts);
  CLI::App* imratio = app.add_subcommand("sweep-imratio", "Sweep im_ratio from 0.1 to 0.6");
  add_config_options(imratio, imratio_opts);
  CLI::App* hparam = app.add_subcommand("sweep-hparam", "Sweep one config key over a grid");
  add_config_options(hparam, hparam_opts);
  std::string param;
  std::vector<std::string> grid;
  hparam->add_option("-p,--param", param, "Key to sweep, e.g. dropout or extractor.xi")->required();
  hparam->add_option("--values", grid, "Grid values (default grid for dropout and xi)")->delimiter(',');
  CLI::App* ablate = app.add_subcommand("ablate", "Run full, no-ufm, no-ase and no-mse");
  add_config_options(ablate, ablate_opts);
  CLI::App* gen = app.add_subcommand("gen-sbm", "Write a stochastic block model dataset directory");
  add_config_options(gen, sbm_opts, false);
  std::string gen_out;
  gen->add_option("--out", gen_out, "Dataset directory to create")->required();
  CLI::App* stats = app.add_subcommand("stats", "Print homophily and class histogram");
  add_config_options(stats, stats_opts, false);
  CLI::App* plot = app.add_subcommand("plot-data", "Print gnuplot columns from a sweep's results.json");
  std::string plot_input;
  plot->add_option("input", plot_input, "results.json or its directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*imratio) return cmd_sweep_imratio(imratio_opts);
    if (*hparam) return cmd_sweep_hparam(hparam_opts, param, grid);
    if (*ablate) return cmd_ablate(ablate_opts);
    if (*gen) return cmd_gen_sbm(sbm_opts, gen_out);
    if (*stats) return cmd_stats(stats_opts);
    if (*plot) return cmd_plot_data(plot_input);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const SplitError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const IngestionError& e) {
    std::cerr << "ingestion error: " << e.what() << "\n";
    return 2;
  } catch (const TrainingAbort& e) {
    std::cerr << "training aborted: " << e.what() << "\n" << e.diagnostics();
    return 3;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 5;
  }
  return 0;
}
