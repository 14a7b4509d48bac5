#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "graphsann/errors.hpp"
#include "graphsann/graph.hpp"
#include "graphsann/sbm.hpp"
#include "graphsann/split.hpp"

namespace graphsann {
namespace {

using ad::Matrix;

Graph make(const EdgeList& edges, int n, std::vector<int> labels = {}) {
  return Graph::from_edge_list(edges, n, Matrix::Zero(n, 1), std::move(labels));
}

Graph random_graph(int n, double p, std::mt19937_64& rng, int classes = 0) {
  std::bernoulli_distribution coin(p);
  EdgeList edges;
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      if (coin(rng)) edges.emplace_back(u, v);
    }
  }
  std::vector<int> labels;
  if (classes > 0) {
    std::uniform_int_distribution<int> pick(0, classes - 1);
    for (int i = 0; i < n; ++i) labels.push_back(pick(rng));
  }
  return make(edges, n, labels);
}

TEST(FromEdgeList, DedupesAndDropsSelfLoops) {
  const Graph g = make({{0, 1}, {1, 0}, {1, 1}}, 2);
  EXPECT_EQ(g.num_edges(), 1u);
  EXPECT_TRUE(g.has_edge(0, 1));
  EXPECT_TRUE(g.has_edge(1, 0));
  EXPECT_FALSE(g.has_edge(1, 1));
}

TEST(FromEdgeList, EmptyEdgeListGivesIsolatedNodes) {
  const Graph g = make({}, 4);
  EXPECT_EQ(g.num_nodes(), 4);
  EXPECT_EQ(g.num_edges(), 0u);
  for (int u = 0; u < 4; ++u) EXPECT_EQ(g.degree(u), 0);
}

TEST(FromEdgeList, PathDegrees) {
  const Graph g = make({{0, 1}, {1, 2}}, 3);
  EXPECT_EQ(g.degree(0), 1);
  EXPECT_EQ(g.degree(1), 2);
  EXPECT_EQ(g.degree(2), 1);
}

TEST(FromEdgeList, OutOfRangeEndpointNamesTheEdge) {
  try {
    make({{0, 1}, {1, 5}}, 3);
    FAIL();
  } catch (const IngestionError& e) {
    EXPECT_NE(std::string(e.what()).find("1"), std::string::npos);
  }
}

TEST(FromEdgeList, CsrInvariantsOnRandomGraphs) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Graph g = random_graph(40, 0.1, rng);
    const auto& off = g.offsets();
    ASSERT_EQ(off.size(), 41u);
    for (int u = 0; u < 40; ++u) {
      EXPECT_LE(off[u], off[u + 1]);
      auto nb = g.neighbors(u);
      EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
      EXPECT_EQ(std::adjacent_find(nb.begin(), nb.end()), nb.end());
      for (NodeId v : nb) {
        EXPECT_NE(u, v);
        EXPECT_TRUE(g.has_edge(v, u));
      }
    }
  }
}

TEST(FromEdgeList, RoundTripThroughEdgeList) {
  std::mt19937_64 rng(8);
  const Graph g = random_graph(30, 0.2, rng);
  const Graph h = make(g.to_edge_list(), 30);
  EXPECT_EQ(g.offsets(), h.offsets());
  EXPECT_EQ(g.targets(), h.targets());
}

TEST(Homophily, TriangleFixture) {
  const Graph g = make({{0, 1}, {1, 2}, {0, 2}}, 3, {0, 0, 1});
  EXPECT_DOUBLE_EQ(edge_homophily(g), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(node_homophily(g), 1.0 / 3.0);
}

TEST(Homophily, AllLabelsEqual) {
  const Graph g = make({{0, 1}, {1, 2}, {2, 3}}, 4, {2, 2, 2, 2});
  EXPECT_DOUBLE_EQ(edge_homophily(g), 1.0);
  EXPECT_DOUBLE_EQ(node_homophily(g), 1.0);
}

TEST(Homophily, IsolatedNodesCountZero) {
  const Graph g = make({{0, 1}}, 3, {0, 0, 0});
  EXPECT_DOUBLE_EQ(node_homophily(g), 2.0 / 3.0);
}

TEST(Homophily, MissingLabelsIsContractError) {
  const Graph g = make({{0, 1}}, 2);
  EXPECT_THROW(edge_homophily(g), ContractError);
  EXPECT_THROW(node_homophily(g), ContractError);
}

TEST(Homophily, InvariantUnderRelabelingAndBounded) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = random_graph(30, 0.15, rng, 3);
    std::vector<int> perm(30);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    EdgeList edges;
    for (auto [u, v] : g.to_edge_list()) edges.emplace_back(perm[u], perm[v]);
    std::vector<int> labels(30);
    for (int u = 0; u < 30; ++u) labels[perm[u]] = g.label(u);
    const Graph h = make(edges, 30, labels);
    EXPECT_NEAR(edge_homophily(g), edge_homophily(h), 1e-12);
    EXPECT_NEAR(node_homophily(g), node_homophily(h), 1e-12);
    for (double x : {edge_homophily(g), node_homophily(g)}) {
      EXPECT_GE(x, 0.0);
      EXPECT_LE(x, 1.0);
    }
  }
}

TEST(Bfs, SourceAndPath) {
  const Graph g = make({{0, 1}, {1, 2}}, 3);
  const auto d = bfs_distance(g, 0);
  EXPECT_EQ(d[0], 0);
  EXPECT_EQ(d[2], 2);
}

TEST(Bfs, CutoffMarksFarNodesInfinite) {
  const Graph g = make({{0, 1}, {1, 2}, {2, 3}}, 5);
  const auto d = bfs_distance(g, 0, 2);
  EXPECT_EQ(d[2], 2);
  EXPECT_EQ(d[3], kInfiniteDistance);
  EXPECT_EQ(d[4], kInfiniteDistance);
}

TEST(Bfs, MatchesFloydWarshall) {
  std::mt19937_64 rng(10);
  const int n = 50;
  const Graph g = random_graph(n, 0.05, rng);
  const int inf = 1 << 20;
  std::vector<std::vector<int>> fw(n, std::vector<int>(n, inf));
  for (int u = 0; u < n; ++u) {
    fw[u][u] = 0;
    for (NodeId v : g.neighbors(u)) fw[u][v] = 1;
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) fw[i][j] = std::min(fw[i][j], fw[i][k] + fw[k][j]);
  for (int s = 0; s < n; ++s) {
    const auto d = bfs_distance(g, s);
    for (int t = 0; t < n; ++t) {
      EXPECT_EQ(d[t] == kInfiniteDistance ? inf : d[t], fw[s][t]) << s << "->" << t;
    }
  }
}

TEST(KHop, IsolatedNodeIsItsOwnNeighborhood) {
  const Graph g = make({{1, 2}}, 3);
  EXPECT_EQ(k_hop_neighbors(g, 0, 3), std::vector<NodeId>{0});
}

TEST(KHop, PathTwoHops) {
  const Graph g = make({{0, 1}, {1, 2}, {2, 3}}, 4);
  EXPECT_EQ(k_hop_neighbors(g, 0, 2), (std::vector<NodeId>{0, 1, 2}));
}

TEST(KHop, MatchesBfsOracle) {
  std::mt19937_64 rng(12);
  const Graph g = random_graph(40, 0.06, rng);
  for (int h = 1; h <= 3; ++h) {
    for (int c = 0; c < 40; ++c) {
      const auto d = bfs_distance(g, c);
      std::vector<NodeId> expect;
      for (int k = 0; k < 40; ++k) {
        if (d[k] <= h) expect.push_back(k);
      }
      EXPECT_EQ(k_hop_neighbors(g, c, h), expect);
    }
  }
}

TEST(KHop, ZeroHopsRejected) {
  const Graph g = make({}, 2);
  EXPECT_ANY_THROW(k_hop_neighbors(g, 0, 0));
}

// --- splits -------------------------------------------------------------------

Graph labeled_blocks(std::vector<int> sizes) {
  std::vector<int> labels;
  for (std::size_t c = 0; c < sizes.size(); ++c) labels.insert(labels.end(), sizes[c], static_cast<int>(c));
  return make({}, static_cast<int>(labels.size()), labels);
}

std::vector<int> per_class(const Graph& g, const std::vector<bool>& mask) {
  std::vector<int> count(g.num_classes(), 0);
  for (int u = 0; u < g.num_nodes(); ++u) {
    if (mask[u]) ++count[g.label(u)];
  }
  return count;
}

TEST(Split, SemiSupervisedMinorityGetsScaledQuota) {
  const Graph g = labeled_blocks({100, 100, 100});
  std::mt19937_64 rng(1);
  const ImbalanceSpec spec{.minority_classes = {2}, .im_ratio = 0.1};
  const SplitMasks m = make_imbalanced_split(g, spec, SplitSetting::kSemiSupervised, {}, rng);
  EXPECT_EQ(per_class(g, m.train), (std::vector<int>{20, 20, 2}));
  const auto val = per_class(g, m.val);
  const auto test = per_class(g, m.test);
  EXPECT_EQ(val[0], val[2]);
  EXPECT_EQ(test[0], test[2]);
  EXPECT_GT(test[0], 0);
}

TEST(Split, ImRatioOneIsBalanced) {
  const Graph g = labeled_blocks({60, 60, 60});
  std::mt19937_64 rng(1);
  const ImbalanceSpec spec{.minority_classes = {1, 2}, .im_ratio = 1.0};
  const SplitMasks m = make_imbalanced_split(g, spec, SplitSetting::kSemiSupervised, {}, rng);
  EXPECT_EQ(per_class(g, m.train), (std::vector<int>{20, 20, 20}));
}

TEST(Split, SupervisedSevenOneTwo) {
  const Graph g = labeled_blocks({100, 100});
  std::mt19937_64 rng(2);
  const ImbalanceSpec spec{.minority_classes = {1}, .im_ratio = 0.2};
  const SplitMasks m = make_imbalanced_split(g, spec, SplitSetting::kSupervised, {}, rng);
  const auto train = per_class(g, m.train);
  EXPECT_EQ(train[0], 70);
  EXPECT_EQ(train[1], 14);
  EXPECT_EQ(per_class(g, m.val)[0], 10);
  EXPECT_EQ(per_class(g, m.test)[0], 20);
}

TEST(Split, MasksDisjointAndDeterministic) {
  const Graph g = labeled_blocks({50, 50, 12});
  const ImbalanceSpec spec{.minority_classes = {2}, .im_ratio = 0.1};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 a(seed), b(seed);
    const SplitMasks m1 = make_imbalanced_split(g, spec, SplitSetting::kSemiSupervised, {}, a);
    const SplitMasks m2 = make_imbalanced_split(g, spec, SplitSetting::kSemiSupervised, {}, b);
    EXPECT_EQ(m1.train, m2.train);
    EXPECT_EQ(m1.test, m2.test);
    for (int u = 0; u < g.num_nodes(); ++u) {
      EXPECT_LE(int(m1.train[u]) + int(m1.val[u]) + int(m1.test[u]), 1);
    }
  }
}

TEST(Split, InfeasibleQuotaNamesTheClass) {
  const Graph g = labeled_blocks({50, 10});
  std::mt19937_64 rng(1);
  const ImbalanceSpec spec{.minority_classes = {}, .im_ratio = 1.0};
  try {
    make_imbalanced_split(g, spec, SplitSetting::kSemiSupervised, {}, rng);
    FAIL();
  } catch (const SplitError& e) {
    EXPECT_NE(std::string(e.what()).find("1"), std::string::npos) << e.what();
  }
}

TEST(Split, SetMasksRejectsOverlap) {
  Graph g = labeled_blocks({2});
  EXPECT_THROW(g.set_masks({{true, false}, {true, false}, {false, false}}), ContractError);
  EXPECT_THROW(g.set_masks({{true}, {false}, {false}}), ContractError);
}

TEST(Split, FloorCountToleratesRounding) {
  EXPECT_EQ(floor_count(20 * 0.3), 6);
  EXPECT_EQ(floor_count(20 * 0.1), 2);
  EXPECT_EQ(floor_count(1.999), 1);
}

// --- SBM ----------------------------------------------------------------------

TEST(Sbm, NoInterEdgesIsPerfectlyHomophilic) {
  SbmSpec spec{.sizes = {30, 30}, .p_intra = 0.2, .p_inter = 0.0,
               .means = SbmSpec::axis_means(2, 4, 1.0), .seed = 3};
  const Graph g = generate_sbm(spec);
  ASSERT_GT(g.num_edges(), 0u);
  EXPECT_DOUBLE_EQ(edge_homophily(g), 1.0);
}

TEST(Sbm, EqualProbabilitiesGiveBaseRate) {
  // Under intra = inter, each undirected pair is an edge with the same
  // probability, so H_edge concentrates on the share of same-label pairs.
  const std::vector<int> sizes = {20, 30, 50};
  const double pairs = 100.0 * 99 / 2;
  const double same = (20.0 * 19 + 30.0 * 29 + 50.0 * 49) / 2;
  const double base = same / pairs;
  double sum = 0.0;
  std::vector<double> samples;
  for (std::uint64_t s = 0; s < 10; ++s) {
    SbmSpec spec{.sizes = sizes, .p_intra = 0.1, .p_inter = 0.1,
                 .means = SbmSpec::axis_means(3, 3, 1.0), .seed = s};
    const Graph g = generate_sbm(spec);
    const double h = edge_homophily(g);
    samples.push_back(h);
    sum += h;
    const double sigma = std::sqrt(base * (1 - base) / static_cast<double>(g.num_edges()));
    EXPECT_NEAR(h, base, 3 * sigma) << "seed " << s;
  }
  EXPECT_NEAR(sum / 10, base, 3 * std::sqrt(base * (1 - base) / (0.1 * pairs * 10)));
}

TEST(Sbm, HeterophilicFixture) {
  // Expected intra edges 0.02 * 2 * C(50,2) = 49, inter 0.2 * 2500 = 500.
  const double expected = 49.0 / (49.0 + 500.0);
  SbmSpec spec{.sizes = {50, 50}, .p_intra = 0.02, .p_inter = 0.2,
               .means = SbmSpec::axis_means(2, 4, 1.0), .seed = 5};
  const Graph g = generate_sbm(spec);
  EXPECT_LT(edge_homophily(g), 0.5);
  EXPECT_NEAR(edge_homophily(g), expected, 0.05);
}

TEST(Sbm, FeaturesCenterOnClassMeans) {
  SbmSpec spec{.sizes = {400, 400}, .p_intra = 0.0, .p_inter = 0.0,
               .means = {{3.0, 0.0}, {0.0, -2.0}}, .noise_std = 0.5, .seed = 1};
  const Graph g = generate_sbm(spec);
  EXPECT_EQ(g.num_classes(), 2);
  EXPECT_NEAR(g.features().topRows(400).col(0).mean(), 3.0, 0.1);
  EXPECT_NEAR(g.features().bottomRows(400).col(1).mean(), -2.0, 0.1);
}

TEST(Sbm, InvalidSpecRejected) {
  SbmSpec spec{.sizes = {10}, .p_intra = 1.5, .p_inter = 0.0, .means = {{0.0}}};
  EXPECT_THROW(generate_sbm(spec), ConfigError);
  spec.p_intra = 0.5;
  spec.sizes = {0};
  EXPECT_THROW(generate_sbm(spec), ConfigError);
}

}  // namespace
}  // namespace graphsann
