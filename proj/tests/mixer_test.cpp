#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <map>
#include <random>

#include "grad_check.hpp"
#include "graphsann/errors.hpp"
#include "graphsann/mixer.hpp"

namespace graphsann {
namespace {

using ad::Matrix;
using testing::uniform_matrix;

// Labeled graph whose first class_counts[c] nodes of each class are training nodes.
Graph training_fixture(const std::vector<int>& train_counts, int extra_per_class, int dim,
                       std::mt19937_64& rng) {
  std::vector<int> labels;
  std::vector<bool> train;
  for (std::size_t c = 0; c < train_counts.size(); ++c) {
    for (int i = 0; i < train_counts[c] + extra_per_class; ++i) {
      labels.push_back(static_cast<int>(c));
      train.push_back(i < train_counts[c]);
    }
  }
  const int n = static_cast<int>(labels.size());
  EdgeList edges;
  std::bernoulli_distribution coin(0.2);
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (coin(rng)) edges.emplace_back(u, v);
  Graph g = Graph::from_edge_list(edges, n, uniform_matrix(n, dim, rng), labels);
  std::vector<bool> test(n, false);
  for (int u = 0; u < n; ++u) test[u] = !train[u];
  g.set_masks({train, std::vector<bool>(n, false), test});
  return g;
}

double chi_square_p_value(const std::map<NodeId, int>& observed, const std::vector<NodeId>& nodes,
                          const std::vector<double>& probs, int draws) {
  double stat = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double expected = probs[i] * draws;
    const auto it = observed.find(nodes[i]);
    const double o = it == observed.end() ? 0.0 : it->second;
    stat += (o - expected) * (o - expected) / expected;
  }
  boost::math::chi_squared dist(static_cast<double>(nodes.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

TEST(TargetDistribution, TwoAndTenFixture) {
  const int counts[] = {2, 10};
  const auto p = target_probabilities(counts);
  const double z = std::log(3.0) + std::log(11.0);
  const double raw2 = std::log(3.0) / (3.0 * z), raw10 = std::log(11.0) / (11.0 * z);
  const double mass = 2 * raw2 + 10 * raw10;
  EXPECT_NEAR(mass, 0.8329, 5e-5);
  EXPECT_NEAR(p[0], raw2 / mass, 1e-15);
  EXPECT_NEAR(p[1], raw10 / mass, 1e-15);
  EXPECT_NEAR(p[0], 0.12574, 5e-6);
  EXPECT_NEAR(p[1], 0.074851, 5e-7);
  EXPECT_NEAR(2 * p[0], 0.2515, 5e-5);
  EXPECT_NEAR(2 * p[0] + 10 * p[1], 1.0, 1e-12);
}

TEST(TargetDistribution, SumsToOneOverCandidates) {
  std::mt19937_64 rng(1);
  const Graph g = training_fixture({3, 17, 8, 1}, 2, 2, rng);
  TargetSampler sampler(g);
  double total = 0.0;
  for (double p : sampler.probabilities()) total += p;
  EXPECT_NEAR(total, 1.0, 1e-12);
  for (NodeId v : sampler.nodes()) EXPECT_TRUE(g.masks().train[v]);
}

TEST(TargetDistribution, EmpiricalFrequenciesPassChiSquare) {
  std::mt19937_64 rng(2);
  const Graph g = training_fixture({2, 10}, 0, 2, rng);
  TargetSampler sampler(g);
  const int draws = 100000;
  std::map<NodeId, int> seen;
  for (int i = 0; i < draws; ++i) ++seen[sampler.draw(rng)];
  EXPECT_GT(chi_square_p_value(seen, sampler.nodes(), sampler.probabilities(), draws), 0.01);
}

TEST(SamplePairs, AnchorUniformWithinClass) {
  std::mt19937_64 rng(3);
  const Graph g = training_fixture({20, 5}, 3, 2, rng);
  const ImbalanceSpec spec{.minority_classes = {1}};
  const MixerConfig cfg{.zeta = 1000.0};
  const auto pairs = sample_pairs(g, spec, cfg, rng);
  ASSERT_EQ(pairs.size(), 5000u);
  std::map<NodeId, int> seen;
  for (const auto& p : pairs) ++seen[p.source];
  const auto members = train_nodes_by_class(g)[1];
  EXPECT_GT(chi_square_p_value(seen, members, std::vector<double>(5, 0.2), 5000), 0.01);
}

TEST(SamplePairs, CountsLabelsAndTrainOnlyPartners) {
  std::mt19937_64 rng(4);
  const Graph g = training_fixture({20, 3, 20, 2}, 5, 3, rng);
  const ImbalanceSpec spec{.minority_classes = {1, 3}};
  for (double zeta : {0.5, 1.0, 2.5}) {
    const auto pairs = sample_pairs(g, spec, MixerConfig{.zeta = zeta}, rng);
    std::map<int, int> per_class;
    for (const auto& p : pairs) {
      ++per_class[g.label(p.source)];
      EXPECT_TRUE(g.masks().train[p.target]);
      EXPECT_TRUE(g.masks().train[p.source]);
      EXPECT_FALSE(g.masks().test[p.target]);
    }
    EXPECT_EQ(per_class[1], static_cast<int>(std::ceil(zeta * 3 - 1e-9)));
    EXPECT_EQ(per_class[3], static_cast<int>(std::ceil(zeta * 2 - 1e-9)));
    EXPECT_EQ(per_class.count(0), 0u);
  }
}

TEST(SamplePairs, EmptyMinorityClassIsSamplingError) {
  std::mt19937_64 rng(5);
  const Graph g = training_fixture({4, 0}, 2, 2, rng);
  const ImbalanceSpec spec{.minority_classes = {1}};
  EXPECT_THROW(sample_pairs(g, spec, MixerConfig{}, rng), SamplingError);
}

TEST(SamplePairs, ZetaScalingEqualizesClasses) {
  std::mt19937_64 rng(6);
  const Graph g = training_fixture({20, 20, 2}, 0, 2, rng);
  const ImbalanceSpec spec{.minority_classes = {2}};
  const auto pairs = sample_pairs(g, spec, MixerConfig{.zeta = 9.0}, rng);
  EXPECT_EQ(static_cast<int>(pairs.size()) + 2, 20);
}

TEST(IntegratedGradient, ExactOnLinearLoss) {
  const RowVector w{{2.0, -1.0}};
  const RowVector x{{3.0, 4.0}};
  const InputGradient grad = [&](const RowVector&) { return w; };
  for (int s : {1, 7, 50}) {
    const RowVector ig = integrated_gradient(grad, x, s);
    EXPECT_DOUBLE_EQ(ig[0], 6.0);
    EXPECT_DOUBLE_EQ(ig[1], -4.0);
  }
}

TEST(IntegratedGradient, ExactOnAffineLossesForAnyStepCount) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const RowVector w = uniform_matrix(1, 6, rng);
    const RowVector x = uniform_matrix(1, 6, rng, -5, 5);
    const InputGradient grad = [&](const RowVector&) { return w; };
    const int s = 1 + trial * 13;
    EXPECT_LT((integrated_gradient(grad, x, s) - x.cwiseProduct(w)).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST(IntegratedGradient, ZeroInputGivesZero) {
  const InputGradient grad = [](const RowVector& z) { return RowVector(z.array().exp()); };
  EXPECT_TRUE(integrated_gradient(grad, RowVector::Zero(4), 50).isZero());
}

TEST(IntegratedGradient, RiemannErrorShrinksWithSteps) {
  // L(x) = sum(v * tanh(x A)), one hidden layer.
  std::mt19937_64 rng(8);
  const Matrix a = uniform_matrix(5, 8, rng, -2, 2);
  const RowVector v = uniform_matrix(1, 8, rng, -2, 2);
  const InputGradient grad = [&](const RowVector& x) {
    const RowVector pre = x * a;
    const RowVector d = v.cwiseProduct((1.0 - pre.array().tanh().square()).matrix());
    return RowVector(d * a.transpose());
  };
  for (int trial = 0; trial < 5; ++trial) {
    const RowVector x = uniform_matrix(1, 5, rng, -1.5, 1.5);
    const RowVector oracle = integrated_gradient(grad, x, 5000);
    const double e50 = (integrated_gradient(grad, x, 50) - oracle).norm();
    const double e10 = (integrated_gradient(grad, x, 10) - oracle).norm();
    EXPECT_LE(e50, e10);
    // Completeness: the attributions sum to L(x) - L(0), up to the O(1/S)
    // error of a right Riemann sum with S = 5000.
    const double lx = v.dot(RowVector((x * a).array().tanh().matrix()));
    EXPECT_NEAR(oracle.sum(), lx, 1e-2);
  }
}

TEST(IntegratedGradient, ClassifierGradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(9);
  const Graph g = training_fixture({6, 6}, 2, 4, rng);
  const int hidden[] = {5, 3};
  ClassifierParams cls = ClassifierParams::init(4, hidden, 2, LayerKind::kMultiFilter, 0.3, 0.7, rng);
  for (Layer& l : cls.layers) l.g_low.value = uniform_matrix(l.g_low.rows(), 1, rng);
  const NodeId node = 3;
  const InputGradient grad = classifier_input_gradient(cls, g, node, 1);

  auto loss_at = [&](const RowVector& x) {
    Matrix feats = g.features();
    feats.row(node) = x;
    const Graph h = Graph::from_edge_list(g.to_edge_list(), g.num_nodes(), feats);
    ad::Tape tape;
    tape.set_grad_enabled(false);
    std::mt19937_64 unused(0);
    return -std::log(classify_nodes(tape, cls, h, false, unused).value()(node, 1));
  };
  const RowVector x = g.features().row(node) * 0.6;
  const RowVector analytic = grad(x);
  for (int i = 0; i < 4; ++i) {
    RowVector up = x, down = x;
    up[i] += 1e-5;
    down[i] -= 1e-5;
    const double numeric = (loss_at(up) - loss_at(down)) / 2e-5;
    EXPECT_NEAR(analytic[i], numeric, 1e-6 * std::max(1.0, std::abs(numeric)));
  }
  for (ad::Parameter* p : cls.parameters()) EXPECT_TRUE(p->grad.isZero()) << p->name;
}

TEST(Similarity, IdenticalFeaturesGiveOne) {
  std::mt19937_64 rng(10);
  const RowVector x = uniform_matrix(1, 4, rng);
  EXPECT_DOUBLE_EQ(pair_similarity(x, x, uniform_matrix(4, 3, rng)), 1.0);
}

TEST(Similarity, ThreeFourFive) {
  EXPECT_DOUBLE_EQ(pair_similarity(RowVector{{3.0, 4.0}}, RowVector{{0.0, 0.0}}, Matrix::Identity(2, 2)),
                   1.0 / 6.0);
}

TEST(Similarity, DecreasesWithDistance) {
  double prev = 2.0;
  for (double d = 0.0; d < 5.0; d += 0.5) {
    const double s = pair_similarity(RowVector{{d, 0.0}}, RowVector{{0.0, 0.0}}, Matrix::Identity(2, 2));
    EXPECT_LT(s, prev);
    prev = s;
  }
}

TEST(Similarity, ShapeMismatchThrows) {
  EXPECT_THROW(pair_similarity(RowVector::Zero(3), RowVector::Zero(3), Matrix::Identity(2, 2)),
               DimensionError);
}

TEST(Mask, ThresholdExample) {
  const RowVector m = build_mask(0.5, RowVector{{0.3, 0.6}}, 1.05);
  EXPECT_EQ(m, (RowVector{{1.0, 0.0}}));
}

TEST(Mask, NonPositiveImportanceKeepsEverything) {
  EXPECT_EQ(build_mask(0.2, RowVector{{0.0, -3.0, -0.1}}, 1.05), RowVector::Ones(3));
}

TEST(Mask, BoundaryIsExcluded) {
  const double kappa = 1.05, sim = 0.5;
  EXPECT_EQ(build_mask(sim, RowVector{{kappa * sim}}, kappa)[0], 0.0);
}

TEST(Mix, Examples) {
  const RowVector xs{{9.0, 9.0}}, xt{{1.0, 1.0}};
  EXPECT_EQ(mix_features(xs, xt, RowVector::Zero(2)), xs);
  EXPECT_EQ(mix_features(xs, xt, RowVector::Ones(2)), xt);
  EXPECT_EQ(mix_features(xs, xt, RowVector{{1.0, 0.0}}), (RowVector{{1.0, 9.0}}));
}

TEST(Mix, EveryCoordinateComesFromAParent) {
  std::mt19937_64 rng(11);
  const Graph g = training_fixture({10, 3}, 2, 6, rng);
  const ImbalanceSpec spec{.minority_classes = {1}};
  const auto pairs = sample_pairs(g, spec, MixerConfig{.zeta = 5.0}, rng);
  std::map<NodeId, RowVector> importance;
  for (const auto& p : pairs) importance[p.target] = uniform_matrix(1, 6, rng, -1, 2);
  const auto synth = mix_pairs(
      g, pairs, [&](NodeId t) -> const RowVector& { return importance.at(t); },
      uniform_matrix(6, 6, rng), 1.05);
  ASSERT_EQ(synth.size(), pairs.size());
  for (const auto& s : synth) {
    EXPECT_EQ(s.label, 1);
    EXPECT_GT(s.pair.similarity, 0.0);
    EXPECT_LE(s.pair.similarity, 1.0);
    for (int i = 0; i < 6; ++i) {
      const double v = s.features[i];
      EXPECT_TRUE(v == g.features()(s.pair.source, i) || v == g.features()(s.pair.target, i));
    }
  }
}

TEST(Smote, InterpolatesTowardNearestSameClassNeighbor) {
  std::mt19937_64 rng(12);
  const Graph g = training_fixture({10, 4}, 2, 3, rng);
  const ImbalanceSpec spec{.minority_classes = {1}};
  const auto synth = smote_nodes(g, spec, MixerConfig{.zeta = 3.0}, rng);
  ASSERT_EQ(synth.size(), 12u);
  const auto members = train_nodes_by_class(g)[1];
  for (const auto& s : synth) {
    EXPECT_EQ(s.label, 1);
    EXPECT_EQ(g.label(s.pair.target), 1);
    const RowVector xs = g.features().row(s.pair.source);
    const RowVector xt = g.features().row(s.pair.target);
    for (NodeId m : members) {
      if (m == s.pair.source) continue;
      EXPECT_LE((xs - xt).squaredNorm(), (xs - RowVector(g.features().row(m))).squaredNorm() + 1e-15);
    }
    // On the segment from x_s to x_t.
    const RowVector dir = xt - xs;
    const double u = (s.features - xs).dot(dir) / dir.squaredNorm();
    EXPECT_GE(u, -1e-12);
    EXPECT_LE(u, 1.0 + 1e-12);
    EXPECT_LT((xs + u * dir - s.features).norm(), 1e-12);
  }
}

}  // namespace
}  // namespace graphsann
