#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "pgcn/config.hpp"
#include "pgcn/graph.hpp"
#include "pgcn/model.hpp"
#include "pgcn/partition.hpp"
#include "pgcn/prompt.hpp"

namespace pgcn {

struct EpochRecord {
  std::size_t epoch = 0;
  /// One entry per subgraph in visit order; empty when the subgraph had no
  /// training signal (no train nodes, or no positive edges).
  std::vector<std::optional<double>> subgraph_losses;
  double val_metric = 0.0;
  std::size_t memory_bytes = 0;
};

struct MetricsReport {
  Task task = Task::node_classification;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double mrr = 0.0;
  double hits_at_k = 0.0;
  std::size_t hits_k = 0;
  double best_val_metric = 0.0;
  std::size_t best_epoch = 0;  // 0 = untrained parameters
  std::vector<EpochRecord> epochs;
  double wall_seconds = 0.0;
  std::size_t memory_bytes = 0;       // per-step estimate
  std::size_t full_batch_memory_bytes = 0;
  std::size_t model_parameters = 0;
  std::size_t prompt_parameters = 0;
  std::size_t edge_cut = 0;
  std::size_t negative_fallbacks = 0;
};

struct StepEvent {
  std::size_t epoch = 0;
  std::size_t subgraph = 0;
  std::size_t step = 0;  // global step counter, 0-based
  const PromptPool* pool = nullptr;
  std::uint64_t pool_version = 0;  // version the forward pass read
};

struct TrainHooks {
  std::function<void(const StepEvent&)> on_step_begin;
  std::function<void(const EpochRecord&)> on_epoch_end;
};

struct TrainResult {
  ModelParams params;  // best-validation checkpoint
  PromptBank prompts;
  MetricsReport report;
  PartitionAssignment partition;
};

/// Sequential subgraph training: every epoch visits the clusters in order and
/// takes one optimizer step per cluster on its induced subgraph, updating the
/// GCN weights and the prompt pool read by that subgraph. Validation runs after
/// each epoch; the best-validation parameters are kept and scored on test.
/// Deterministic in cfg.seed. Throws DivergenceError on a non-finite loss.
TrainResult train(const Dataset& data, const TrainConfig& cfg, const TrainHooks& hooks = {});

/// Scores given parameters on the test (and validation) split under cfg's
/// partition, exactly as train() does for its checkpoint.
MetricsReport evaluate(const Dataset& data, const TrainConfig& cfg, const ModelParams& params,
                       const PromptBank& prompts);

/// Per-step memory estimate for cfg on data, and the c = 1 figure for the
/// same model.
std::size_t estimate_memory(const Dataset& data, const TrainConfig& cfg);

}  // namespace pgcn
