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

#include "graphsann/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "graphsann/errors.hpp"

namespace graphsann {

SbmSpec SbmSettings::spec() const {
  return SbmSpec{.sizes = sizes,
                 .p_intra = p_intra,
                 .p_inter = p_inter,
                 .means = SbmSpec::axis_means(static_cast<int>(sizes.size()), feature_dim, separation),
                 .noise_std = noise_std,
                 .seed = graph_seed};
}

void ExperimentConfig::validate() const {
  if (dataset && sbm) throw ConfigError("data.path and an [sbm] section are mutually exclusive");
  if (!dataset && !sbm) throw ConfigError("either data.path or an [sbm] section is required");
  if (repeat < 1) throw ConfigError("run.repeat must be >= 1");
  if (!seeds.empty() && static_cast<int>(seeds.size()) != repeat) {
    throw ConfigError("run.seeds lists " + std::to_string(seeds.size()) + " seeds but run.repeat is " +
                      std::to_string(repeat));
  }
  if (!(imbalance.im_ratio > 0.0 && imbalance.im_ratio <= 1.0)) {
    throw ConfigError("imbalance.im_ratio must lie in (0, 1]");
  }
  if (imbalance.majority_train_count < 1) {
    throw ConfigError("imbalance.majority_train_count must be >= 1");
  }
  if (minority_count < 1) throw ConfigError("imbalance.minority_count must be >= 1");
  if (eval.val_per_class < 0) throw ConfigError("data.val_per_class must be >= 0");
  if (eval.test_per_class < 0) throw ConfigError("data.test_per_class must be >= 0");
  if (!(eval.val_fraction > 0.0 && eval.val_fraction < 1.0)) {
    throw ConfigError("data.val_fraction must lie in (0, 1)");
  }
  if (sbm) {
    if (sbm->feature_dim < 1) throw ConfigError("sbm.feature_dim must be >= 1");
    try {
      sbm->spec().validate();
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("sbm: ") + e.what());
    }
  }
  hp.validate();
}

std::vector<std::uint64_t> ExperimentConfig::seed_list() const {
  if (!seeds.empty()) return seeds;
  std::vector<std::uint64_t> out(static_cast<std::size_t>(repeat));
  std::iota(out.begin(), out.end(), std::uint64_t{0});
  return out;
}

ImbalanceSpec ExperimentConfig::imbalance_for(int num_classes) const {
  ImbalanceSpec out = imbalance;
  if (out.minority_classes.empty()) {
    if (minority_count >= num_classes) {
      throw ConfigError("imbalance.minority_count must be below the class count (" +
                        std::to_string(num_classes) + ")");
    }
    for (int c = num_classes - minority_count; c < num_classes; ++c) out.minority_classes.push_back(c);
  }
  try {
    out.validate(num_classes);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("imbalance: ") + e.what());
  }
  return out;
}

namespace {

[[noreturn]] void bad_value(const std::string& key, const std::string& expected,
                            const std::string& value) {
  throw ConfigError(key + ": expected " + expected + ", got '" + value + "'");
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& raw, const char* expected) {
  const std::string s = trim(raw);
  T out{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) bad_value(key, expected, raw);
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  return parse_number<double>(key, v, "a number");
}
int to_int(const std::string& key, const std::string& v) {
  return parse_number<int>(key, v, "an integer");
}
std::uint64_t to_u64(const std::string& key, const std::string& v) {
  return parse_number<std::uint64_t>(key, v, "a non-negative integer");
}

bool to_bool(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, "true or false", raw);
}

template <class T, class Parse>
std::vector<T> to_list(const std::string& key, const std::string& raw, Parse parse) {
  std::vector<T> out;
  if (trim(raw).empty()) return out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse(key, item));
  return out;
}

std::string fmt(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <class T>
std::string fmt_list(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(values[i]);
  }
  return out;
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

SbmSettings& sbm_of(ExperimentConfig& c) {
  if (!c.sbm) c.sbm.emplace();
  return *c.sbm;
}

std::vector<ConfigKey> make_keys() {
  std::vector<ConfigKey> keys;
  auto add = [&keys](std::string section, std::string name, auto set, auto get) {
    keys.push_back({std::move(section), std::move(name), set, get});
  };

// Scalar fields of HyperParams share one shape.
#define GRAPHSANN_HP_KEY(section, field, parse, format)                               \
  add(section, #field,                                                               \
      [](ExperimentConfig& c, const std::string& v) { c.hp.field = parse(section "." #field, v); }, \
      [](const ExperimentConfig& c) { return format(c.hp.field); })

  add("data", "path",
      [](ExperimentConfig& c, const std::string& v) {
        if (trim(v).empty()) bad_value("data.path", "a directory", v);
        c.dataset = trim(v);
      },
      [](const ExperimentConfig& c) { return c.dataset ? c.dataset->string() : std::string(); });
  add("data", "setting",
      [](ExperimentConfig& c, const std::string& v) {
        const std::string s = trim(v);
        if (s == "semi") {
          c.setting = SplitSetting::kSemiSupervised;
        } else if (s == "supervised") {
          c.setting = SplitSetting::kSupervised;
        } else {
          bad_value("data.setting", "semi or supervised", v);
        }
      },
      [](const ExperimentConfig& c) {
        return std::string(c.setting == SplitSetting::kSemiSupervised ? "semi" : "supervised");
      });
  add("data", "eval",
      [](ExperimentConfig& c, const std::string& v) {
        const std::string s = trim(v);
        if (s == "equal") {
          c.eval.mode = EvalSplit::Mode::kEqualCount;
        } else if (s == "ratio") {
          c.eval.mode = EvalSplit::Mode::kRatio;
        } else {
          bad_value("data.eval", "equal or ratio", v);
        }
      },
      [](const ExperimentConfig& c) {
        return std::string(c.eval.mode == EvalSplit::Mode::kEqualCount ? "equal" : "ratio");
      });
  add("data", "val_per_class",
      [](ExperimentConfig& c, const std::string& v) { c.eval.val_per_class = to_int("data.val_per_class", v); },
      [](const ExperimentConfig& c) { return std::to_string(c.eval.val_per_class); });
  add("data", "test_per_class",
      [](ExperimentConfig& c, const std::string& v) { c.eval.test_per_class = to_int("data.test_per_class", v); },
      [](const ExperimentConfig& c) { return std::to_string(c.eval.test_per_class); });
  add("data", "val_fraction",
      [](ExperimentConfig& c, const std::string& v) { c.eval.val_fraction = to_double("data.val_fraction", v); },
      [](const ExperimentConfig& c) { return fmt(c.eval.val_fraction); });

  add("sbm", "sizes",
      [](ExperimentConfig& c, const std::string& v) { sbm_of(c).sizes = to_list<int>("sbm.sizes", v, to_int); },
      [](const ExperimentConfig& c) { return c.sbm ? fmt_list(c.sbm->sizes) : std::string(); });
  add("sbm", "p_intra",
      [](ExperimentConfig& c, const std::string& v) { sbm_of(c).p_intra = to_double("sbm.p_intra", v); },
      [](const ExperimentConfig& c) { return c.sbm ? fmt(c.sbm->p_intra) : std::string(); });
  add("sbm", "p_inter",
      [](ExperimentConfig& c, const std::string& v) { sbm_of(c).p_inter = to_double("sbm.p_inter", v); },
      [](const ExperimentConfig& c) { return c.sbm ? fmt(c.sbm->p_inter) : std::string(); });
  add("sbm", "feature_dim",
      [](ExperimentConfig& c, const std::string& v) { sbm_of(c).feature_dim = to_int("sbm.feature_dim", v); },
      [](const ExperimentConfig& c) { return c.sbm ? std::to_string(c.sbm->feature_dim) : std::string(); });
  add("sbm", "separation",
      [](ExperimentConfig& c, const std::string& v) { sbm_of(c).separation = to_double("sbm.separation", v); },
      [](const ExperimentConfig& c) { return c.sbm ? fmt(c.sbm->separation) : std::string(); });
  add("sbm", "noise_std",
      [](ExperimentConfig& c, const std::string& v) { sbm_of(c).noise_std = to_double("sbm.noise_std", v); },
      [](const ExperimentConfig& c) { return c.sbm ? fmt(c.sbm->noise_std) : std::string(); });
  add("sbm", "graph_seed",
      [](ExperimentConfig& c, const std::string& v) { sbm_of(c).graph_seed = to_u64("sbm.graph_seed", v); },
      [](const ExperimentConfig& c) { return c.sbm ? std::to_string(c.sbm->graph_seed) : std::string(); });

  add("imbalance", "minority",
      [](ExperimentConfig& c, const std::string& v) {
        c.imbalance.minority_classes = to_list<int>("imbalance.minority", v, to_int);
      },
      [](const ExperimentConfig& c) { return fmt_list(c.imbalance.minority_classes); });
  add("imbalance", "minority_count",
      [](ExperimentConfig& c, const std::string& v) { c.minority_count = to_int("imbalance.minority_count", v); },
      [](const ExperimentConfig& c) { return std::to_string(c.minority_count); });
  add("imbalance", "im_ratio",
      [](ExperimentConfig& c, const std::string& v) { c.imbalance.im_ratio = to_double("imbalance.im_ratio", v); },
      [](const ExperimentConfig& c) { return fmt(c.imbalance.im_ratio); });
  add("imbalance", "majority_train_count",
      [](ExperimentConfig& c, const std::string& v) {
        c.imbalance.majority_train_count = to_int("imbalance.majority_train_count", v);
      },
      [](const ExperimentConfig& c) { return std::to_string(c.imbalance.majority_train_count); });

  GRAPHSANN_HP_KEY("train", learning_rate, to_double, fmt);
  GRAPHSANN_HP_KEY("train", weight_decay, to_double, fmt);
  GRAPHSANN_HP_KEY("train", dropout, to_double, fmt);
  GRAPHSANN_HP_KEY("train", encoder_dropout, to_double, fmt);
  GRAPHSANN_HP_KEY("train", epochs, to_int, std::to_string);
  GRAPHSANN_HP_KEY("train", patience, to_int, std::to_string);
  GRAPHSANN_HP_KEY("train", eval_interval, to_int, std::to_string);
  GRAPHSANN_HP_KEY("train", lambda, to_double, fmt);
  GRAPHSANN_HP_KEY("train", eta, to_double, fmt);
  GRAPHSANN_HP_KEY("train", batch_size, to_int, std::to_string);
  GRAPHSANN_HP_KEY("train", omega, to_double, fmt);
  add("train", "hidden",
      [](ExperimentConfig& c, const std::string& v) { c.hp.hidden = to_list<int>("train.hidden", v, to_int); },
      [](const ExperimentConfig& c) { return fmt_list(c.hp.hidden); });
  add("train", "aggregation",
      [](ExperimentConfig& c, const std::string& v) {
        const std::string s = trim(v);
        if (s == "symmetric") {
          c.hp.aggregation = Aggregation::kSymmetric;
        } else if (s == "sum") {
          c.hp.aggregation = Aggregation::kSum;
        } else {
          bad_value("train.aggregation", "symmetric or sum", v);
        }
      },
      [](const ExperimentConfig& c) {
        return std::string(c.hp.aggregation == Aggregation::kSymmetric ? "symmetric" : "sum");
      });
  GRAPHSANN_HP_KEY("train", warmup_epochs, to_int, std::to_string);
  GRAPHSANN_HP_KEY("train", refresh_interval, to_int, std::to_string);
  GRAPHSANN_HP_KEY("train", drop_isolated_synthetic, to_bool, fmt_bool);
  GRAPHSANN_HP_KEY("train", edge_holdout_fraction, to_double, fmt);

  GRAPHSANN_HP_KEY("mixer", zeta, to_double, fmt);
  GRAPHSANN_HP_KEY("mixer", kappa, to_double, fmt);
  GRAPHSANN_HP_KEY("mixer", riemann_steps, to_int, std::to_string);
  GRAPHSANN_HP_KEY("mixer", projection_dim, to_int, std::to_string);

  GRAPHSANN_HP_KEY("extractor", xi, to_double, fmt);
  GRAPHSANN_HP_KEY("extractor", hops, to_int, std::to_string);
  GRAPHSANN_HP_KEY("extractor", density_hops, to_int, std::to_string);
  GRAPHSANN_HP_KEY("extractor", drnl_cap, to_int, std::to_string);
  GRAPHSANN_HP_KEY("extractor", random_relevance_form, to_bool, fmt_bool);
#undef GRAPHSANN_HP_KEY

  add("run", "ablation",
      [](ExperimentConfig& c, const std::string& v) {
        try {
          c.ablation = parse_ablation(trim(v));
        } catch (const ConfigError&) {
          bad_value("run.ablation", "full, no-ufm, no-ase or no-mse", v);
        }
      },
      [](const ExperimentConfig& c) { return to_string(c.ablation); });
  add("run", "repeat",
      [](ExperimentConfig& c, const std::string& v) { c.repeat = to_int("run.repeat", v); },
      [](const ExperimentConfig& c) { return std::to_string(c.repeat); });
  add("run", "seeds",
      [](ExperimentConfig& c, const std::string& v) {
        c.seeds = to_list<std::uint64_t>("run.seeds", v, to_u64);
        if (!c.seeds.empty()) c.repeat = static_cast<int>(c.seeds.size());
      },
      [](const ExperimentConfig& c) { return fmt_list(c.seed_list()); });
  add("run", "output_dir",
      [](ExperimentConfig& c, const std::string& v) { c.output_dir = trim(v); },
      [](const ExperimentConfig& c) { return c.output_dir.string(); });
  return keys;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = make_keys();
  return keys;
}

void set_config_value(ExperimentConfig& cfg, const std::string& path, const std::string& value) {
  const auto& keys = config_keys();
  const auto it = std::find_if(keys.begin(), keys.end(), [&](const ConfigKey& k) { return k.path() == path; });
  if (it == keys.end()) throw ConfigError("unknown key '" + path + "'");
  it->set(cfg, value);
}

ExperimentConfig parse_config(std::istream& in, bool validate) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("malformed config at line " + std::to_string(e.line()) + ": " + e.message());
  }
  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("unknown key '" + section + "' outside any section");
    for (const auto& [name, value] : body) set_config_value(cfg, section + "." + name, value.data());
  }
  if (validate) cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_config(in);
}

std::string to_ini(const ExperimentConfig& cfg) {
  std::ostringstream os;
  std::string current;
  for (const ConfigKey& k : config_keys()) {
    // The seed list carries the repeat count.
    if (k.path() == "run.repeat") continue;
    const std::string value = k.get(cfg);
    if (value.empty()) continue;
    if (k.section != current) {
      os << (current.empty() ? "" : "\n") << "[" << k.section << "]\n";
      current = k.section;
    }
    os << k.name << " = " << value << "\n";
  }
  return os.str();
}

}  // namespace graphsann
