#include "pgcn/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>

#include "pgcn/error.hpp"
#include "pgcn/link.hpp"
#include "pgcn/memory.hpp"
#include "pgcn/metrics.hpp"
#include "pgcn/optim.hpp"
#include "pgcn/rng.hpp"

namespace pgcn {

namespace {

struct Cluster {
  SubgraphBatch batch;
  SparseMatrix adjacency;
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> heads;  // local ids of positive training edges
  std::vector<std::size_t> tails;
  std::vector<Edge> positives;
};

struct Setup {
  std::optional<EdgeSplit> edges;
  PartitionAssignment partition;
  std::vector<Cluster> clusters;
  std::vector<std::size_t> widths;
  std::size_t prompt_count = 0;

  const Graph& message_graph(const Dataset& data) const { return edges ? edges->message_graph : data.graph; }
};

// Fixed negatives for one evaluation edge set, so every epoch ranks against
// the same candidates.
struct LinkEvalSet {
  std::vector<Edge> positives;
  std::vector<std::vector<NodeId>> negatives;
};

bool any_set(std::span<const std::uint8_t> mask) {
  return std::any_of(mask.begin(), mask.end(), [](std::uint8_t b) { return b != 0; });
}

Setup prepare(const Dataset& data, const TrainConfig& cfg) {
  cfg.validate();
  if (data.num_nodes() == 0) throw InvalidArgument("train: empty graph");
  if (data.feature_dim() == 0) throw InvalidArgument("train: zero feature dimension");
  if (data.labels.size() != data.num_nodes()) throw ShapeError("train: label count != node count");
  if (cfg.task == Task::node_classification && data.labels.num_classes == 0) {
    throw InvalidArgument("train: node classification needs at least one class");
  }

  Setup s;
  if (cfg.task == Task::link_prediction) s.edges = split_edges(data.graph, derive_seed(cfg.seed, Stream::split));
  const Graph& g = s.message_graph(data);
  s.partition = partition(g, cfg.clusters, cfg.strategy, derive_seed(cfg.seed, Stream::partition));
  s.widths = cfg.widths(data.feature_dim(), data.labels.num_classes);
  s.prompt_count = cfg.prompt_count(data.labels.num_classes);
  if (cfg.sharing != PromptSharing::none && s.prompt_count == 0) {
    throw InvalidArgument("train: prompt count resolves to zero (set prompts explicitly)");
  }

  for (const auto& ids : s.partition.members()) {
    Cluster c;
    c.batch = induce_subgraph(g, data.features, data.labels, ids);
    c.adjacency = normalize_adjacency(c.batch.local_graph);
    for (std::size_t i = 0; i < c.batch.size(); ++i) {
      if (c.batch.local_labels.train[i]) c.train_rows.push_back(i);
    }
    c.positives = c.batch.local_graph.edge_list();
    for (const auto& [u, v] : c.positives) {
      c.heads.push_back(u);
      c.tails.push_back(v);
    }
    s.clusters.push_back(std::move(c));
  }
  return s;
}

ModelOptions model_options(const TrainConfig& cfg, bool training) {
  ModelOptions o;
  o.mode = cfg.mode;
  o.alpha = cfg.alpha;
  o.dropout = cfg.dropout;
  o.training = training;
  return o;
}

// Eval-mode outputs for every node, computed cluster by cluster.
DenseMatrix infer_all(const Setup& s, const Dataset& data, const ModelParams& params, const PromptBank& bank,
                      const TrainConfig& cfg) {
  DenseMatrix out(data.num_nodes(), s.widths.back());
  const auto opts = model_options(cfg, false);
  for (std::size_t t = 0; t < s.clusters.size(); ++t) {
    const auto& c = s.clusters[t];
    const DenseMatrix local = infer(c.batch.local_features, c.adjacency, bank.pool_for(t), params, opts);
    for (std::size_t i = 0; i < c.batch.size(); ++i) {
      std::copy(local.row(i).begin(), local.row(i).end(), out.row(c.batch.global_ids[i]).begin());
    }
  }
  return out;
}

LinkEvalSet make_link_eval_set(const Graph& full, std::span<const Edge> edges, std::size_t negatives_per_edge,
                               std::uint64_t seed) {
  LinkEvalSet set;
  set.positives.assign(edges.begin(), edges.end());
  Rng rng(seed);
  std::vector<Edge> repeated;
  for (const auto& e : edges) {
    repeated.assign(negatives_per_edge, e);
    set.negatives.push_back(negative_sample(full, repeated, rng).tails);
  }
  return set;
}

double dot_rows(const DenseMatrix& z, NodeId a, NodeId b) {
  double s = 0.0;
  for (std::size_t c = 0; c < z.cols(); ++c) s += z(a, c) * z(b, c);
  return s;
}

LinkScores score_links(const DenseMatrix& z, const LinkEvalSet& set, std::size_t k) {
  if (set.positives.empty()) return {};
  std::vector<double> pos(set.positives.size());
  DenseMatrix neg(set.positives.size(), set.negatives.front().size());
  for (std::size_t i = 0; i < set.positives.size(); ++i) {
    const auto [u, v] = set.positives[i];
    pos[i] = dot_rows(z, u, v);
    for (std::size_t j = 0; j < set.negatives[i].size(); ++j) neg(i, j) = dot_rows(z, u, set.negatives[i][j]);
  }
  return evaluate_link(pos, neg, k);
}

struct Evaluator {
  const Setup& setup;
  const Dataset& data;
  const TrainConfig& cfg;
  LinkEvalSet val_links;
  LinkEvalSet test_links;

  Evaluator(const Setup& s, const Dataset& d, const TrainConfig& c) : setup(s), data(d), cfg(c) {
    if (cfg.task == Task::link_prediction) {
      val_links = make_link_eval_set(data.graph, setup.edges->val, cfg.eval_negatives,
                                     derive_seed(cfg.seed, Stream::eval_negatives, 0));
      test_links = make_link_eval_set(data.graph, setup.edges->test, cfg.eval_negatives,
                                      derive_seed(cfg.seed, Stream::eval_negatives, 1));
    }
  }

  double validation_metric(const ModelParams& params, const PromptBank& bank) const {
    const DenseMatrix z = infer_all(setup, data, params, bank, cfg);
    if (cfg.task == Task::link_prediction) return score_links(z, val_links, cfg.hits_k).mrr;
    if (!any_set(data.labels.val)) return 0.0;
    return evaluate_classification(z, data.labels.labels, data.labels.val, data.labels.num_classes).accuracy;
  }

  void score_test(const ModelParams& params, const PromptBank& bank, MetricsReport& report) const {
    const DenseMatrix z = infer_all(setup, data, params, bank, cfg);
    if (cfg.task == Task::link_prediction) {
      const auto s = score_links(z, test_links, cfg.hits_k);
      report.mrr = s.mrr;
      report.hits_at_k = s.hits_at_k;
    } else if (any_set(data.labels.test)) {
      const auto s = evaluate_classification(z, data.labels.labels, data.labels.test, data.labels.num_classes);
      report.accuracy = s.accuracy;
      report.macro_f1 = s.macro_f1;
    }
  }
};

std::size_t full_batch_memory(const Graph& g, std::span<const std::size_t> widths, std::size_t prompt_params) {
  PartitionAssignment whole;
  whole.num_clusters = 1;
  whole.cluster_of.assign(g.num_nodes(), 0);
  return estimate_step_memory(g, whole, widths, prompt_params);
}

void fill_static_fields(const Setup& s, const Dataset& data, const TrainConfig& cfg, const ModelParams& params,
                        const PromptBank& bank, MetricsReport& r) {
  const Graph& g = s.message_graph(data);
  const std::size_t live_prompt = cfg.sharing == PromptSharing::none ? 0 : s.prompt_count * data.feature_dim();
  r.task = cfg.task;
  r.hits_k = cfg.hits_k;
  r.memory_bytes = estimate_step_memory(g, s.partition, s.widths, live_prompt);
  r.full_batch_memory_bytes = full_batch_memory(g, s.widths, live_prompt);
  r.model_parameters = params.parameter_count();
  r.prompt_parameters = bank.parameter_count();
  r.edge_cut = s.partition.edge_cut;
}

}  // namespace

TrainResult train(const Dataset& data, const TrainConfig& cfg, const TrainHooks& hooks) {
  const auto started = std::chrono::steady_clock::now();
  const Setup setup = prepare(data, cfg);
  const Evaluator evaluator(setup, data, cfg);

  ModelParams params = init_params(setup.widths, cfg.bias, derive_seed(cfg.seed, Stream::init));
  PromptBank bank(cfg.sharing, setup.clusters.size(), setup.prompt_count, data.feature_dim(),
                  derive_seed(cfg.seed, Stream::prompt_init));

  TrainResult result;
  result.partition = setup.partition;
  MetricsReport& report = result.report;
  fill_static_fields(setup, data, cfg, params, bank, report);

  AdamOptions adam;
  adam.lr = cfg.lr;
  adam.weight_decay = cfg.weight_decay;
  std::vector<AdamState> weight_state(params.weights.size());
  std::vector<AdamState> bias_state(params.biases.size());
  std::vector<AdamState> pool_state(bank.num_pools());

  Rng dropout_rng(derive_seed(cfg.seed, Stream::dropout));
  Rng negative_rng(derive_seed(cfg.seed, Stream::negatives));
  Rng order_rng(derive_seed(cfg.seed, Stream::shuffle));
  const auto train_opts = model_options(cfg, true);
  const bool link = cfg.task == Task::link_prediction;

  ModelParams best_params = params;
  PromptBank best_bank = bank;
  double best_val = -1.0;
  std::size_t step = 0;

  std::vector<std::size_t> order(setup.clusters.size());
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (cfg.shuffle_subgraphs) order_rng.shuffle(std::span<std::size_t>(order));

    EpochRecord record;
    record.epoch = epoch;
    record.memory_bytes = report.memory_bytes;
    for (const std::size_t t : order) {
      const Cluster& cluster = setup.clusters[t];
      if (link ? cluster.positives.empty() : cluster.train_rows.empty()) {
        record.subgraph_losses.emplace_back();
        continue;
      }
      PromptPool* pool = bank.pool_for(t);
      const std::size_t pool_slot = cfg.sharing == PromptSharing::isolated ? t : 0;
      if (hooks.on_step_begin) {
        hooks.on_step_begin(StepEvent{epoch, t, step, pool, pool ? pool->version() : 0});
      }

      double loss_value = 0.0;
      try {
        Tape tape;
        const auto pass = forward(tape, cluster.batch.local_features, cluster.adjacency, pool, params, train_opts,
                                  &dropout_rng);
        Var loss;
        if (link) {
          const auto negatives = negative_sample(cluster.batch.local_graph, cluster.positives, negative_rng);
          report.negative_fallbacks += negatives.fallbacks;
          const std::vector<std::size_t> neg(negatives.tails.begin(), negatives.tails.end());
          loss = tape.link_bce(pass.output, cluster.heads, cluster.tails, neg);
          if (cfg.ortho_for_link && pass.prompts.valid()) {
            loss = tape.add(loss, tape.scale(tape.orthogonality(pass.prompts), cfg.gamma));
          }
        } else {
          loss = classification_loss(tape, pass.output, cluster.batch.local_labels.labels, cluster.train_rows,
                                     pass.prompts, cfg.gamma);
        }
        loss_value = tape.value(loss)(0, 0);
        tape.backward(loss);

        for (std::size_t l = 0; l < params.weights.size(); ++l) {
          adam_step(params.weights[l], tape.grad(pass.weights[l]), weight_state[l], adam);
        }
        for (std::size_t l = 0; l < params.biases.size(); ++l) {
          adam_step(params.biases[l], tape.grad(pass.biases[l]), bias_state[l], adam);
        }
        if (pool != nullptr && pass.prompts.valid()) {
          adam_step(pool->mutable_values(), tape.grad(pass.prompts), pool_state[pool_slot], adam);
        }
      } catch (const NumericalError& e) {
        throw DivergenceError(epoch, t, step, e.what());
      }
      if (!std::isfinite(loss_value)) throw DivergenceError(epoch, t, step, "loss is not finite");
      record.subgraph_losses.emplace_back(loss_value);
      ++step;
    }

    record.val_metric = evaluator.validation_metric(params, bank);
    if (record.val_metric > best_val) {
      best_val = record.val_metric;
      best_params = params;
      best_bank = bank;
      report.best_epoch = epoch;
    }
    if (hooks.on_epoch_end) hooks.on_epoch_end(record);
    report.epochs.push_back(std::move(record));
  }

  if (cfg.epochs == 0) best_val = evaluator.validation_metric(params, bank);
  report.best_val_metric = best_val;
  evaluator.score_test(best_params, best_bank, report);
  result.params = std::move(best_params);
  result.prompts = std::move(best_bank);
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

MetricsReport evaluate(const Dataset& data, const TrainConfig& cfg, const ModelParams& params,
                       const PromptBank& prompts) {
  const Setup setup = prepare(data, cfg);
  if (params.widths() != setup.widths) throw ShapeError("evaluate: checkpoint widths do not match the config");
  if (prompts.sharing() != cfg.sharing) throw InvalidArgument("evaluate: checkpoint prompt sharing differs");
  const Evaluator evaluator(setup, data, cfg);
  MetricsReport report;
  fill_static_fields(setup, data, cfg, params, prompts, report);
  report.best_val_metric = evaluator.validation_metric(params, prompts);
  evaluator.score_test(params, prompts, report);
  return report;
}

std::size_t estimate_memory(const Dataset& data, const TrainConfig& cfg) {
  cfg.validate();
  std::optional<EdgeSplit> split;
  if (cfg.task == Task::link_prediction) split = split_edges(data.graph, derive_seed(cfg.seed, Stream::split));
  const Graph& g = split ? split->message_graph : data.graph;
  const auto widths = cfg.widths(data.feature_dim(), data.labels.num_classes);
  const std::size_t prompt_params =
      cfg.sharing == PromptSharing::none ? 0 : cfg.prompt_count(data.labels.num_classes) * data.feature_dim();
  const auto p = partition(g, cfg.clusters, cfg.strategy, derive_seed(cfg.seed, Stream::partition));
  return estimate_step_memory(g, p, widths, prompt_params);
}

}  // namespace pgcn
