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

#include "graphsann/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iterator>
#include <map>
#include <ostream>
#include <sstream>

#include "graphsann/adam.hpp"
#include "graphsann/errors.hpp"
#include "graphsann/losses.hpp"

namespace graphsann {

std::string to_string(Ablation a) {
  switch (a) {
    case Ablation::kFull: return "full";
    case Ablation::kNoUfm: return "no-ufm";
    case Ablation::kNoAse: return "no-ase";
    case Ablation::kNoMse: return "no-mse";
  }
  return "full";
}

Ablation parse_ablation(const std::string& name) {
  for (Ablation a : {Ablation::kFull, Ablation::kNoUfm, Ablation::kNoAse, Ablation::kNoMse}) {
    if (to_string(a) == name) return a;
  }
  throw ConfigError("unknown ablation '" + name + "' (expected full, no-ufm, no-ase or no-mse)");
}

void HyperParams::validate() const {
  if (!(learning_rate > 0.0)) throw ConfigError("train.learning_rate must be > 0");
  if (!(weight_decay >= 0.0)) throw ConfigError("train.weight_decay must be >= 0");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("train.dropout must lie in [0, 1)");
  if (!(encoder_dropout >= 0.0 && encoder_dropout < 1.0)) {
    throw ConfigError("train.encoder_dropout must lie in [0, 1)");
  }
  if (epochs < 1) throw ConfigError("train.epochs must be >= 1");
  if (patience < 1) throw ConfigError("train.patience must be >= 1");
  if (eval_interval < 1) throw ConfigError("train.eval_interval must be >= 1");
  if (!(lambda > 0.0 && lambda <= 1.0)) throw ConfigError("train.lambda must lie in (0, 1]");
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("train.eta must lie in (0, 1)");
  if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
  if (!(omega >= 0.0)) throw ConfigError("train.omega must be >= 0");
  if (hidden.empty()) throw ConfigError("train.hidden needs at least one layer");
  for (int d : hidden) {
    if (d < 1) throw ConfigError("train.hidden widths must be >= 1");
  }
  if (warmup_epochs < 0) throw ConfigError("train.warmup_epochs must be >= 0");
  if (refresh_interval < 1) throw ConfigError("train.refresh_interval must be >= 1");
  if (!(edge_holdout_fraction >= 0.0 && edge_holdout_fraction < 1.0)) {
    throw ConfigError("train.edge_holdout_fraction must lie in [0, 1)");
  }
  mixer().validate();
  extractor(Ablation::kFull).validate();
}

MixerConfig HyperParams::mixer() const {
  return MixerConfig{kappa, zeta, riemann_steps, projection_dim};
}

ExtractorConfig HyperParams::extractor(Ablation a) const {
  return ExtractorConfig{xi, hops, drnl_cap, density_hops, a != Ablation::kNoAse,
                         random_relevance_form};
}

Graph build_balanced_graph(const Graph& g, std::span<const SyntheticNode> synthetic,
                           std::span<const CandidateEdge> accepted, bool drop_isolated) {
  const int n = g.num_nodes();
  std::vector<int> degree(synthetic.size(), 0);
  for (const CandidateEdge& c : accepted) ++degree[c.synthetic];

  std::vector<int> new_id(synthetic.size(), -1);
  int next = n;
  for (std::size_t i = 0; i < synthetic.size(); ++i) {
    if (!drop_isolated || degree[i] > 0) new_id[i] = next++;
  }

  ad::Matrix features(next, g.feature_dim());
  features.topRows(n) = g.features();
  std::vector<int> labels = g.labels();
  labels.resize(static_cast<std::size_t>(next), kUnlabeled);
  for (std::size_t i = 0; i < synthetic.size(); ++i) {
    if (new_id[i] < 0) continue;
    features.row(new_id[i]) = synthetic[i].features;
    labels[new_id[i]] = synthetic[i].label;
  }

  EdgeList edges = g.to_edge_list();
  for (const CandidateEdge& c : accepted) edges.emplace_back(new_id[c.synthetic], c.target);
  Graph out = Graph::from_edge_list(edges, next, std::move(features), std::move(labels));
  if (!g.class_names().empty()) out.set_class_names(g.class_names());

  SplitMasks masks = g.masks();
  masks.train.resize(static_cast<std::size_t>(next), true);
  masks.val.resize(static_cast<std::size_t>(next), false);
  masks.test.resize(static_cast<std::size_t>(next), false);
  out.set_masks(std::move(masks));
  return out;
}

std::vector<double> score_edges(EncoderParams& enc, const Graph& g,
                                std::span<const std::pair<NodeId, NodeId>> pairs,
                                const ExtractorConfig& cfg) {
  ad::Tape tape;
  tape.set_grad_enabled(false);
  std::mt19937_64 unused(0);
  const GraphView view(g);
  const ad::Matrix scores =
      score_pairs(tape, enc, view, pairs, cfg, RelevanceModel{&enc}, false, unused).value();
  return {scores.data(), scores.data() + scores.size()};
}

ad::Matrix predict(ClassifierParams& cls, const Graph& g) {
  ad::Tape tape;
  tape.set_grad_enabled(false);
  std::mt19937_64 unused(0);
  return classify_nodes(tape, cls, g, false, unused).value();
}

namespace {

struct TrainingRows {
  std::vector<int> rows;
  std::vector<int> labels;
};

TrainingRows training_rows(const Graph& g) {
  TrainingRows out;
  for (NodeId u = 0; u < g.num_nodes(); ++u) {
    if (g.masks().train[u] && g.label(u) != kUnlabeled) {
      out.rows.push_back(u);
      out.labels.push_back(g.label(u));
    }
  }
  return out;
}

std::string dump_state(int epoch, double rec, double cls, double total,
                       std::span<ad::Parameter* const> params) {
  std::ostringstream os;
  os << "epoch " << epoch << ": l_rec=" << rec << " l_cls=" << cls << " total=" << total << "\n";
  for (const ad::Parameter* p : params) {
    const bool value_ok = p->value.allFinite();
    const bool grad_ok = p->grad.allFinite();
    if (value_ok && grad_ok) continue;
    os << "  " << p->name << " [" << p->value.rows() << "x" << p->value.cols() << "]"
       << (value_ok ? "" : " value non-finite") << (grad_ok ? "" : " grad non-finite") << "\n";
  }
  return os.str();
}

void guard_finite(int epoch, double rec, double cls, double total,
                  std::span<ad::Parameter* const> params) {
  bool ok = std::isfinite(total);
  for (const ad::Parameter* p : params) ok = ok && p->grad.allFinite() && p->value.allFinite();
  if (!ok) {
    throw TrainingAbort("non-finite loss or gradient at epoch " + std::to_string(epoch),
                        dump_state(epoch, rec, cls, total, params));
  }
}

double accuracy_on(const ad::Matrix& probs, const Graph& g, const std::vector<bool>& mask) {
  return evaluate(probs, g.labels(), mask).accuracy;
}

}  // namespace

PipelineResult run_pipeline(const Graph& g, const ImbalanceSpec& spec, const HyperParams& hp,
                            Ablation ablation, std::ostream* epoch_log) {
  hp.validate();
  if (!g.has_labels()) throw ContractError("run_pipeline needs a labeled graph");
  spec.validate(g.num_classes());
  const std::size_t n = static_cast<std::size_t>(g.num_nodes());
  if (g.masks().train.size() != n || g.masks().val.size() != n || g.masks().test.size() != n) {
    throw ContractError("run_pipeline needs train/val/test masks");
  }

  std::mt19937_64 rng(hp.seed);
  const MixerConfig mcfg = hp.mixer();
  const ExtractorConfig ecfg = hp.extractor(ablation);
  const LayerKind kind =
      ablation == Ablation::kNoMse ? LayerKind::kMeanAggregation : LayerKind::kMultiFilter;
  const int d = g.feature_dim();

  EncoderParams enc = EncoderParams::init(d + ecfg.drnl_cap + 1, hp.hidden, kind, hp.omega, rng);
  enc.dropout = hp.encoder_dropout;
  enc.aggregation = hp.aggregation;
  ClassifierParams cls =
      ClassifierParams::init(d, hp.hidden, g.num_classes(), kind, hp.omega, hp.dropout, rng);
  cls.aggregation = hp.aggregation;
  const ad::Matrix projection = glorot_uniform(d, mcfg.projection_dim > 0 ? mcfg.projection_dim : d, rng);
  const RelevanceModel relevance{&enc, relevance_form(ecfg, rng)};

  std::vector<ad::Parameter*> params = enc.parameters();
  for (ad::Parameter* p : cls.parameters()) params.push_back(p);
  ad::Adam adam({.learning_rate = hp.learning_rate, .weight_decay = hp.weight_decay});

  PipelineResult result;
  EdgeList train_edges = g.to_edge_list();
  std::shuffle(train_edges.begin(), train_edges.end(), rng);
  const std::size_t held =
      static_cast<std::size_t>(floor_count(hp.edge_holdout_fraction * train_edges.size()));
  result.held_out_edges.assign(train_edges.begin(), train_edges.begin() + held);
  train_edges.erase(train_edges.begin(), train_edges.begin() + held);

  const TrainingRows original_rows = training_rows(g);
  if (original_rows.rows.empty()) throw ContractError("run_pipeline: empty training set");

  if (epoch_log) *epoch_log << "epoch,l_rec,l_cls,total,val_acc,wall_time_s\n";
  const auto start = std::chrono::steady_clock::now();
  auto record = [&](EpochLog entry) {
    entry.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (epoch_log) {
      *epoch_log << entry.epoch << ',' << entry.reconstruction << ',' << entry.classification << ','
                 << entry.total << ',' << entry.val_accuracy << ',' << entry.seconds << '\n';
    }
    result.log.push_back(entry);
  };

  for (int e = 0; e < hp.warmup_epochs; ++e) {
    const int epoch = e - hp.warmup_epochs;
    ad::Tape tape;
    ad::Var probs = classify_nodes(tape, cls, g, true, rng);
    ad::Var loss = classification_loss(probs, original_rows.rows, original_rows.labels);
    tape.backward(loss);
    guard_finite(epoch, 0.0, loss.scalar(), loss.scalar(), params);
    adam.step(params);
    record({.epoch = epoch,
            .classification = loss.scalar(),
            .total = loss.scalar(),
            .val_accuracy = accuracy_on(predict(cls, g), g, g.masks().val)});
  }

  std::map<NodeId, RowVector> attributions;
  auto importance = [&](NodeId t) -> const RowVector& {
    auto it = attributions.find(t);
    if (it == attributions.end()) {
      const RowVector x = g.features().row(t);
      it = attributions
               .emplace(t, integrated_gradient(classifier_input_gradient(cls, g, t, g.label(t)), x,
                                               mcfg.riemann_steps))
               .first;
    }
    return it->second;
  };

  int since_best = 0;
  for (int epoch = 0; epoch < hp.epochs; ++epoch) {
    if (epoch % hp.refresh_interval == 0) attributions.clear();

    std::vector<SyntheticNode> synthetic;
    if (mcfg.zeta > 0.0) {
      if (ablation == Ablation::kNoUfm) {
        synthetic = smote_nodes(g, spec, mcfg, rng);
      } else {
        const auto pairs = sample_pairs(g, spec, mcfg, rng);
        synthetic = mix_pairs(g, pairs, importance, projection, mcfg.kappa);
      }
    }
    std::vector<NodePair> anchors;
    for (const SyntheticNode& s : synthetic) anchors.push_back(s.pair);
    const auto candidates = sample_candidate_edges(g, anchors, ecfg, rng);

    std::vector<double> candidate_scores;
    candidate_scores.reserve(candidates.size());
    for (const CandidateEdge& c : candidates) {
      const SyntheticNode& s = synthetic[c.synthetic];
      const GraphView view(g, s.features, s.pair.source, s.pair.target);
      ad::Tape tape;
      tape.set_grad_enabled(false);
      const std::pair<NodeId, NodeId> edge[] = {{view.synthetic_id(), c.target}};
      candidate_scores.push_back(
          score_pairs(tape, enc, view, edge, ecfg, relevance, false, rng).value()(0, 0));
    }
    std::vector<CandidateEdge> accepted;
    std::vector<double> accepted_scores;
    for (std::size_t i : apply_threshold(candidate_scores, hp.eta)) {
      accepted.push_back(candidates[i]);
      accepted_scores.push_back(candidate_scores[i]);
    }
    Graph balanced = build_balanced_graph(g, synthetic, accepted, hp.drop_isolated_synthetic);
    const TrainingRows rows = training_rows(balanced);

    ad::Tape tape;
    ad::Var rec = tape.constant(ad::Matrix::Zero(1, 1));
    if (!train_edges.empty()) {
      std::vector<std::pair<NodeId, NodeId>> positives;
      std::sample(train_edges.begin(), train_edges.end(), std::back_inserter(positives),
                  hp.batch_size, rng);
      const ReconstructionBatch batch = with_negatives(g, positives, rng);
      const GraphView view(g);
      ad::Var pos = score_pairs(tape, enc, view, batch.positives, ecfg, relevance, true, rng);
      ad::Var neg = score_pairs(tape, enc, view, batch.negatives, ecfg, relevance, true, rng);
      rec = reconstruction_loss(pos, neg);
    }
    ad::Var probs = classify_nodes(tape, cls, balanced, true, rng);
    ad::Var cls_loss = classification_loss(probs, rows.rows, rows.labels);
    ad::Var total = total_loss(rec, cls_loss, hp.lambda);
    tape.backward(total);
    guard_finite(epoch, rec.scalar(), cls_loss.scalar(), total.scalar(), params);
    adam.step(params);

    result.epochs_run = epoch + 1;
    const bool check = (epoch + 1) % hp.eval_interval == 0 || epoch + 1 == hp.epochs;
    const ad::Matrix eval_probs = predict(cls, balanced);
    const MetricsReport val = evaluate(eval_probs, balanced.labels(), balanced.masks().val);
    record({.epoch = epoch,
            .reconstruction = rec.scalar(),
            .classification = cls_loss.scalar(),
            .total = total.scalar(),
            .val_accuracy = val.accuracy,
            .synthetic_nodes = balanced.num_nodes() - g.num_nodes(),
            .synthetic_edges = static_cast<int>(accepted.size())});
    if (!check) continue;

    if (val.accuracy > result.best_val_accuracy) {
      result.best_val_accuracy = val.accuracy;
      result.best_epoch = epoch;
      result.val = val;
      result.test = evaluate(eval_probs, balanced.labels(), balanced.masks().test);
      result.encoder = enc;
      result.classifier = cls;
      result.synthetic_nodes = balanced.num_nodes() - g.num_nodes();
      result.accepted_edge_scores = std::move(accepted_scores);
      result.balanced = std::move(balanced);
      since_best = 0;
    } else if (++since_best >= hp.patience) {
      break;
    }
  }
  result.projection = projection;
  return result;
}

}  // namespace graphsann
