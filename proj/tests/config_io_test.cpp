#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "graphsann/checkpoint.hpp"
#include "graphsann/config.hpp"
#include "graphsann/dataset_io.hpp"
#include "graphsann/errors.hpp"
#include "graphsann/experiment.hpp"
#include "graphsann/sbm.hpp"

namespace graphsann {
namespace {

namespace fs = std::filesystem;

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

template <class F>
std::string config_error(F&& f) {
  try {
    f();
  } catch (const ConfigError& e) {
    return e.what();
  }
  ADD_FAILURE() << "expected ConfigError";
  return "";
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("graphsann_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

fs::path triangle_dir() { return fs::path(GRAPHSANN_TEST_DATA_DIR) / "triangle"; }

TEST(Config, DatasetOnlyConfigGetsPublishedDefaults) {
  const ExperimentConfig c = parse("[data]\npath = some/dir\n");
  ASSERT_TRUE(c.dataset.has_value());
  EXPECT_EQ(*c.dataset, "some/dir");
  EXPECT_DOUBLE_EQ(c.hp.kappa, 1.05);
  EXPECT_DOUBLE_EQ(c.hp.omega, 0.3);
  EXPECT_DOUBLE_EQ(c.hp.eta, 0.5);
  EXPECT_DOUBLE_EQ(c.hp.dropout, 0.7);
  EXPECT_DOUBLE_EQ(c.hp.xi, 0.3);
  EXPECT_DOUBLE_EQ(c.hp.zeta, 1.0);
  EXPECT_DOUBLE_EQ(c.hp.learning_rate, 0.001);
  EXPECT_DOUBLE_EQ(c.hp.weight_decay, 5e-4);
  EXPECT_DOUBLE_EQ(c.hp.lambda, 1e-6);
  EXPECT_EQ(c.hp.epochs, 2000);
  EXPECT_EQ(c.hp.patience, 5);
  EXPECT_EQ(c.hp.batch_size, 32);
  EXPECT_EQ(c.hp.riemann_steps, 50);
  EXPECT_EQ(c.hp.hops, 2);
  EXPECT_EQ(c.hp.hidden, (std::vector<int>{64, 32}));
  EXPECT_DOUBLE_EQ(c.imbalance.im_ratio, 0.1);
  EXPECT_EQ(c.imbalance.majority_train_count, 20);
  EXPECT_EQ(c.repeat, 1);
}

TEST(Config, LambdaZeroIsRejected) {
  const std::string msg = config_error([] { parse("[data]\npath = d\n[train]\nlambda = 0\n"); });
  EXPECT_NE(msg.find("train.lambda"), std::string::npos) << msg;
  EXPECT_NO_THROW(parse("[data]\npath = d\n[train]\nlambda = 1\n"));
}

TEST(Config, DatasetAndSbmAreExclusive) {
  EXPECT_FALSE(config_error([] { parse("[data]\npath = d\n[sbm]\nsizes = 10,10\n"); }).empty());
  EXPECT_FALSE(config_error([] { parse("[train]\ndropout = 0.5\n"); }).empty());
  EXPECT_NO_THROW(parse("[sbm]\nsizes = 10,10\n"));
}

TEST(Config, UnknownKeyNamesItsPath) {
  const std::string msg = config_error([] { parse("[data]\npath = d\n[train]\nlearning_rat = 0.1\n"); });
  EXPECT_NE(msg.find("train.learning_rat"), std::string::npos) << msg;
  const std::string section = config_error([] { parse("[data]\npath = d\n[model]\nlayers = 2\n"); });
  EXPECT_NE(section.find("model.layers"), std::string::npos) << section;
  EXPECT_FALSE(config_error([] { parse("stray = 1\n[data]\npath = d\n"); }).empty());
}

TEST(Config, MalformedValueNamesKey) {
  const std::string msg = config_error([] { parse("[data]\npath = d\n[train]\ndropout = high\n"); });
  EXPECT_NE(msg.find("train.dropout"), std::string::npos) << msg;
  const std::string list = config_error([] { parse("[data]\npath = d\n[train]\nhidden = 64,x\n"); });
  EXPECT_NE(list.find("train.hidden"), std::string::npos) << list;
  const std::string mode = config_error([] { parse("[data]\npath = d\n[run]\nablation = no-gcn\n"); });
  EXPECT_NE(mode.find("run.ablation"), std::string::npos) << mode;
}

TEST(Config, RepeatAndSeeds) {
  EXPECT_FALSE(config_error([] { parse("[data]\npath = d\n[run]\nrepeat = 0\n"); }).empty());
  const ExperimentConfig a = parse("[data]\npath = d\n[run]\nrepeat = 3\n");
  EXPECT_EQ(a.seed_list(), (std::vector<std::uint64_t>{0, 1, 2}));
  const ExperimentConfig b = parse("[data]\npath = d\n[run]\nseeds = 7,11\n");
  EXPECT_EQ(b.repeat, 2);
  EXPECT_EQ(b.seed_list(), (std::vector<std::uint64_t>{7, 11}));
  EXPECT_FALSE(config_error([] { parse("[data]\npath = d\n[run]\nseeds = 7,11\nrepeat = 5\n"); }).empty());
}

TEST(Config, InvariantViolationsNameTheKey) {
  EXPECT_NE(config_error([] { parse("[data]\npath = d\n[imbalance]\nim_ratio = 1.5\n"); })
                .find("imbalance.im_ratio"),
            std::string::npos);
  EXPECT_NE(config_error([] { parse("[data]\npath = d\n[extractor]\nxi = 0\n"); }).find("extractor.xi"),
            std::string::npos);
  EXPECT_NE(config_error([] { parse("[data]\npath = d\n[train]\ndropout = 1\n"); }).find("train.dropout"),
            std::string::npos);
  EXPECT_NE(config_error([] { parse("[sbm]\nsizes = 10,10\np_intra = 2\n"); }).find("sbm"),
            std::string::npos);
}

TEST(Config, EchoReparsesToTheSameConfig) {
  ExperimentConfig c = parse(
      "[sbm]\nsizes = 40,40,8\np_intra = 0.02\np_inter = 0.2\nseparation = 2.5\ngraph_seed = 9\n"
      "[imbalance]\nminority = 2\nim_ratio = 0.3\n"
      "[train]\nlearning_rate = 0.01\nlambda = 0.5\nhidden = 16,8\naggregation = sum\n"
      "drop_isolated_synthetic = true\n[mixer]\nzeta = 2.5\n[extractor]\nxi = 0.1\n"
      "[run]\nablation = no-ase\nseeds = 3,4,5\n");
  c.hp.weight_decay = 0.1 + 0.2;  // not exactly representable in short decimal form
  const std::string echo = to_ini(c);
  std::istringstream in(echo);
  const ExperimentConfig back = parse_config(in);
  EXPECT_EQ(to_ini(back), echo);
  EXPECT_EQ(back.hp.weight_decay, c.hp.weight_decay);
  EXPECT_EQ(back.hp.aggregation, Aggregation::kSum);
  EXPECT_EQ(back.ablation, Ablation::kNoAse);
  EXPECT_EQ(back.seed_list(), (std::vector<std::uint64_t>{3, 4, 5}));
  ASSERT_TRUE(back.sbm.has_value());
  EXPECT_EQ(back.sbm->sizes, (std::vector<int>{40, 40, 8}));
  EXPECT_EQ(back.sbm->graph_seed, 9u);
  EXPECT_FALSE(back.dataset.has_value());
}

TEST(Config, DefaultMinorityIsTheHighestClassIds) {
  ExperimentConfig c = parse("[data]\npath = d\n[imbalance]\nminority_count = 3\n");
  EXPECT_EQ(c.imbalance_for(7).minority_classes, (std::vector<int>{4, 5, 6}));
  EXPECT_THROW(c.imbalance_for(3), ConfigError);
  c.imbalance.minority_classes = {0};
  EXPECT_EQ(c.imbalance_for(7).minority_classes, (std::vector<int>{0}));
}

TEST(Config, SetValueRejectsUnknownKeys) {
  ExperimentConfig c;
  EXPECT_THROW(set_config_value(c, "train.nope", "1"), ConfigError);
  set_config_value(c, "extractor.hops", "3");
  EXPECT_EQ(c.hp.hops, 3);
}

TEST(Dataset, TriangleFixture) {
  const Graph g = load_dataset(triangle_dir());
  EXPECT_EQ(g.num_nodes(), 3);
  EXPECT_EQ(g.num_edges(), 3u);
  EXPECT_EQ(g.feature_dim(), 2);
  EXPECT_EQ(g.labels(), (std::vector<int>{0, 0, 1}));
  EXPECT_EQ(g.class_names(), (std::vector<std::string>{"a", "b"}));
  EXPECT_DOUBLE_EQ(edge_homophily(g), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(node_homophily(g), 1.0 / 3.0);
}

TEST(Dataset, MissingFileIsNamed) {
  const fs::path dir = fresh_dir("missing");
  fs::copy(triangle_dir(), dir, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
  fs::remove(dir / "labels.csv");
  try {
    load_dataset(dir);
    FAIL() << "expected IngestionError";
  } catch (const IngestionError& e) {
    EXPECT_NE(std::string(e.what()).find("labels.csv"), std::string::npos) << e.what();
  }
  fs::remove_all(dir);
}

TEST(Dataset, RowCountMismatchIsAnIngestionError) {
  const fs::path dir = fresh_dir("mismatch");
  fs::copy(triangle_dir(), dir, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
  write(dir / "labels.csv", "node_id,class\n0,a\n1,b\n");
  EXPECT_THROW(load_dataset(dir), IngestionError);
  write(dir / "labels.csv", "node_id,class\n0,a\n1,b\n2,a\n3,b\n");
  EXPECT_THROW(load_dataset(dir), IngestionError);
  fs::remove_all(dir);
}

TEST(Dataset, MalformedRowsReportTheLine) {
  const fs::path dir = fresh_dir("malformed");
  fs::copy(triangle_dir(), dir, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
  write(dir / "edges.tsv", "0\t1\n1\t7\n");
  try {
    load_dataset(dir);
    FAIL() << "expected IngestionError";
  } catch (const IngestionError& e) {
    EXPECT_NE(std::string(e.what()).find("edges.tsv:2"), std::string::npos) << e.what();
  }
  write(dir / "edges.tsv", "0 1\n");
  EXPECT_THROW(load_dataset(dir), IngestionError);
  write(dir / "edges.tsv", "0\t1\n");
  write(dir / "features.csv", "1,0\n0,1,2\n1,1\n");
  EXPECT_THROW(load_dataset(dir), IngestionError);
  write(dir / "features.csv", "1,0\n0,1\n1,1\n");
  write(dir / "labels.csv", "id,label\n0,a\n1,a\n2,b\n");
  EXPECT_THROW(load_dataset(dir), IngestionError);
  fs::remove_all(dir);
}

TEST(Dataset, NumericClassNamesSortNumerically) {
  const fs::path dir = fresh_dir("numeric");
  write(dir / "edges.tsv", "# comment line\n0\t1  # trailing comment\n");
  write(dir / "features.csv", "0\n1\n2\n");
  write(dir / "labels.csv", "node_id,class\n0,10\n1,2\n2,10\n");
  const Graph g = load_dataset(dir);
  EXPECT_EQ(g.class_names(), (std::vector<std::string>{"2", "10"}));
  EXPECT_EQ(g.labels(), (std::vector<int>{1, 0, 1}));
  EXPECT_EQ(g.num_edges(), 1u);
  fs::remove_all(dir);
}

TEST(Dataset, SaveLoadRoundTrip) {
  const Graph g = generate_sbm({.sizes = {12, 9, 4},
                               .p_intra = 0.3,
                               .p_inter = 0.05,
                               .means = SbmSpec::axis_means(3, 5, 2.0),
                               .noise_std = 1.0,
                               .seed = 4});
  const fs::path dir = fresh_dir("roundtrip");
  save_dataset(g, dir);
  const Graph back = load_dataset(dir);
  EXPECT_EQ(back.to_edge_list(), g.to_edge_list());
  EXPECT_EQ(back.labels(), g.labels());
  EXPECT_TRUE(back.features() == g.features());
  fs::remove_all(dir);
}

TEST(Report, Summaries) {
  const std::vector<double> v = {1.0, 2.0, 3.0};
  EXPECT_DOUBLE_EQ(summarize(v).mean, 2.0);
  EXPECT_DOUBLE_EQ(summarize(v).std, 1.0);
  const std::vector<double> one = {0.4};
  EXPECT_DOUBLE_EQ(summarize(one).mean, 0.4);
  EXPECT_DOUBLE_EQ(summarize(one).std, 0.0);
}

RunReport awkward_report() {
  RunReport r;
  r.config = "[data]\npath = x\n";
  for (std::uint64_t seed : {0u, 1u}) {
    SeedRun s;
    s.seed = seed;
    s.test.count = 18;
    s.test.accuracy = 0.1 + 0.2 + static_cast<double>(seed);
    s.test.macro_f1 = 1.0 / 3.0;
    s.test.macro_auc = 0.7773;
    s.test.precision = {1e-300, 4.9e-324};
    s.test.recall = {0.5, 2.0 / 3.0};
    s.test.f1 = {0.1, 0.7};
    s.test.auc = {0.0, 0.9};
    s.test.auc_skipped = {true, false};
    s.test.confusion = {{3, 1}, {0, 5}};
    s.best_epoch = 12;
    s.epochs_run = 17;
    s.seconds = 1.25;
    r.runs.push_back(s);
  }
  r.accuracy = {0.8, std::sqrt(2.0)};
  r.macro_f1 = {0.7494, 0.01};
  r.macro_auc = {0.9559, 1e-17};
  r.edge_homophily = 0.81;
  r.node_homophily = 0.8252;
  r.class_histogram = {351, 217, 418};
  r.seconds = 12.5;
  return r;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

TEST(Report, JsonRoundTripIsBitExact) {
  const RunReport r = awkward_report();
  const RunReport back = report_from_json(report_to_json(r));
  ASSERT_EQ(back.runs.size(), r.runs.size());
  EXPECT_EQ(back.config, r.config);
  for (std::size_t i = 0; i < r.runs.size(); ++i) {
    const MetricsReport& a = r.runs[i].test;
    const MetricsReport& b = back.runs[i].test;
    EXPECT_EQ(back.runs[i].seed, r.runs[i].seed);
    EXPECT_TRUE(same_bits(a.accuracy, b.accuracy));
    EXPECT_TRUE(same_bits(a.macro_f1, b.macro_f1));
    EXPECT_TRUE(same_bits(a.macro_auc, b.macro_auc));
    for (std::size_t c = 0; c < a.precision.size(); ++c) {
      EXPECT_TRUE(same_bits(a.precision[c], b.precision[c]));
      EXPECT_TRUE(same_bits(a.recall[c], b.recall[c]));
    }
    EXPECT_EQ(a.auc_skipped, b.auc_skipped);
    EXPECT_EQ(a.confusion, b.confusion);
    EXPECT_TRUE(same_bits(r.runs[i].seconds, back.runs[i].seconds));
  }
  EXPECT_TRUE(same_bits(back.accuracy.std, r.accuracy.std));
  EXPECT_TRUE(same_bits(back.macro_auc.std, r.macro_auc.std));
  EXPECT_TRUE(same_bits(back.node_homophily, r.node_homophily));
  EXPECT_EQ(back.class_histogram, r.class_histogram);
  EXPECT_THROW(report_from_json("{\"config\": 1}"), IngestionError);
  EXPECT_THROW(report_from_json("not json"), IngestionError);
}

TEST(Report, MetricsCsvHasOneRowPerSeedInPercent) {
  const std::string csv = metrics_csv(awkward_report());
  std::istringstream in(csv);
  std::string header, first, second, extra;
  std::getline(in, header);
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_FALSE(std::getline(in, extra));
  EXPECT_EQ(header, "seed,accuracy,macro_f1,macro_auc,best_epoch,epochs_run");
  EXPECT_EQ(first, "0,30.00,33.33,77.73,12,17");
  EXPECT_EQ(second, "1,130.00,33.33,77.73,12,17");
}

TEST(Report, SweepOutputs) {
  std::vector<SweepRow> rows = {{"imbalance.im_ratio", "0.1", awkward_report()},
                                {"imbalance.im_ratio", "0.2", awkward_report()}};
  const std::string sweep = sweep_csv(rows);
  EXPECT_NE(sweep.find("imbalance.im_ratio,0.2,80.00,141.42,74.94,1.00,95.59,0.00"), std::string::npos)
      << sweep;
  const auto back = sweep_from_json(sweep_to_json(rows));
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].value, "0.2");
  EXPECT_TRUE(same_bits(back[1].report.macro_f1.mean, 0.7494));
  const std::string plot = plot_columns(rows);
  EXPECT_NE(plot.find("1 0.2 80.00 141.42 74.94 1.00 95.59 0.00"), std::string::npos) << plot;
  const std::string per_seed = metrics_csv(rows);
  EXPECT_EQ(std::count(per_seed.begin(), per_seed.end(), '\n'), 5);
}

TEST(Report, EmitWritesFilesAndReportsIoFailures) {
  const fs::path dir = fresh_dir("emit");
  emit_report(awkward_report(), dir / "run");
  EXPECT_TRUE(fs::exists(dir / "run" / "results.json"));
  EXPECT_TRUE(fs::exists(dir / "run" / "metrics.csv"));
  std::vector<SweepRow> rows = {{"ablation", "full", awkward_report()}};
  emit_sweep(rows, dir / "sweep");
  EXPECT_TRUE(fs::exists(dir / "sweep" / "sweep.csv"));
  write(dir / "blocker", "a file, not a directory");
  EXPECT_THROW(emit_report(awkward_report(), dir / "blocker" / "out"), IoError);
  fs::remove_all(dir);
}

ExperimentConfig tiny_sbm_config() {
  ExperimentConfig c;
  c.sbm = SbmSettings{.sizes = {30, 30, 20}, .p_intra = 0.15, .p_inter = 0.02, .feature_dim = 8,
                      .separation = 3.0, .noise_std = 1.0, .graph_seed = 1};
  c.eval.val_per_class = 2;
  c.eval.test_per_class = 3;
  c.hp.epochs = 3;
  c.hp.warmup_epochs = 1;
  c.hp.riemann_steps = 4;
  c.hp.hidden = {8, 4};
  c.hp.lambda = 0.5;
  c.hp.learning_rate = 0.01;
  return c;
}

TEST(Experiment, RepeatFiveReportsFiveSeedsWithSpread) {
  ExperimentConfig c = tiny_sbm_config();
  c.repeat = 5;
  const Graph g = load_graph(c);
  const RunReport r = run_experiment(c, g);
  ASSERT_EQ(r.runs.size(), 5u);
  for (const Summary& s : {r.accuracy, r.macro_f1, r.macro_auc}) {
    EXPECT_GE(s.mean, 0.0);
    EXPECT_LE(s.mean, 1.0);
    EXPECT_GE(s.std, 0.0);
  }
  EXPECT_EQ(r.class_histogram, (std::vector<int>{30, 30, 20}));
  EXPECT_DOUBLE_EQ(r.edge_homophily, edge_homophily(g));
  std::istringstream csv(metrics_csv(r));
  EXPECT_EQ(std::count(std::istreambuf_iterator<char>(csv), {}, '\n'), 6);
}

TEST(Experiment, ConfigEchoReproducesTheMetrics) {
  ExperimentConfig c = tiny_sbm_config();
  c.seeds = {4, 9};
  c.repeat = 2;
  const RunReport first = run_experiment(c, load_graph(c));
  std::istringstream echo(first.config);
  const ExperimentConfig again = parse_config(echo);
  const RunReport second = run_experiment(again, load_graph(again));
  ASSERT_EQ(second.runs.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(second.runs[i].seed, first.runs[i].seed);
    EXPECT_EQ(second.runs[i].test.accuracy, first.runs[i].test.accuracy);
    EXPECT_EQ(second.runs[i].test.macro_f1, first.runs[i].test.macro_f1);
    EXPECT_EQ(second.runs[i].test.macro_auc, first.runs[i].test.macro_auc);
  }
}

TEST(Experiment, CheckpointsRestoreIntoFreshModels) {
  ExperimentConfig c = tiny_sbm_config();
  c.hp.epochs = 2;
  c.seeds = {7};
  const fs::path dir = fresh_dir("ckpt");
  run_experiment(c, load_graph(c), {.checkpoint_dir = dir});
  const Checkpoint ckpt = load_checkpoint(dir / "checkpoint_seed7.bin");
  EXPECT_NE(ckpt.hyperparameters.find("seed = 7"), std::string::npos);
  ASSERT_EQ(ckpt.arrays.back().name, "similarity_projection");
  EXPECT_EQ(ckpt.arrays.back().value.rows(), 8);

  std::mt19937_64 rng(0);
  const int d = 8, drnl_width = c.hp.drnl_cap + 1;
  EncoderParams enc = EncoderParams::init(d + drnl_width, c.hp.hidden, LayerKind::kMultiFilter, c.hp.omega, rng);
  ClassifierParams cls = ClassifierParams::init(d, c.hp.hidden, 3, LayerKind::kMultiFilter, c.hp.omega, c.hp.dropout, rng);
  std::vector<ad::Parameter*> params = enc.parameters();
  for (ad::Parameter* p : cls.parameters()) params.push_back(p);
  EXPECT_EQ(ckpt.arrays.size(), params.size() + 1);
  EXPECT_NO_THROW(restore_parameters(ckpt, params));
  fs::remove_all(dir);
}

TEST(Experiment, ImRatioSweepHasSixPoints) {
  ExperimentConfig c = tiny_sbm_config();
  c.hp.epochs = 1;
  const auto rows = sweep_im_ratio(c, load_graph(c));
  ASSERT_EQ(rows.size(), 6u);
  const std::vector<std::string> expected = {"0.1", "0.2", "0.3", "0.4", "0.5", "0.6"};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].value, expected[i]);
    EXPECT_NE(rows[i].report.config.find("im_ratio = " + expected[i]), std::string::npos);
  }
}

TEST(Experiment, AblationSuiteHasFourRows) {
  ExperimentConfig c = tiny_sbm_config();
  c.hp.epochs = 1;
  const auto rows = ablation_suite(c, load_graph(c));
  ASSERT_EQ(rows.size(), 4u);
  const std::vector<std::string> expected = {"full", "no-ufm", "no-ase", "no-mse"};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].parameter, "ablation");
    EXPECT_EQ(rows[i].value, expected[i]);
  }
}

TEST(Experiment, DefaultGrids) {
  EXPECT_EQ(default_grid("train.dropout").size(), 5u);
  EXPECT_EQ(default_grid("extractor.xi"), (std::vector<std::string>{"0.01", "0.1", "0.3", "0.5", "0.7", "0.9"}));
  EXPECT_THROW(default_grid("train.eta"), ConfigError);
}

}  // namespace
}  // namespace graphsann
