#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pgcn/partition.hpp"
#include "pgcn/prompt.hpp"

namespace pgcn {

enum class Task { node_classification, link_prediction };

std::string_view to_string(Task t) noexcept;
Task parse_task(std::string_view name);

/// Hyperparameters of one training run. Defaults follow the reference setup:
/// lr 1e-3, dropout 0.5, weight decay 5e-4, gamma 0.1.
struct TrainConfig {
  double lr = 0.001;
  double dropout = 0.5;
  double weight_decay = 0.0005;
  double gamma = 0.1;
  double alpha = 0.2;
  std::size_t prompts = 0;  // M; 0 means one prompt per class
  std::size_t layers = 3;
  std::size_t hidden = 64;
  std::size_t epochs = 100;
  std::size_t clusters = 6;
  PartitionStrategy strategy = PartitionStrategy::degree_ldg;
  AttachMode mode = AttachMode::concat;
  PromptSharing sharing = PromptSharing::shared;
  Task task = Task::node_classification;
  bool bias = false;
  bool shuffle_subgraphs = false;
  bool ortho_for_link = false;
  std::size_t embedding_dim = 0;  // link prediction output width; 0 means hidden
  std::size_t eval_negatives = 100;
  std::size_t hits_k = 10;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument on the first out-of-range field.
  void validate() const;

  std::size_t prompt_count(std::size_t num_classes) const noexcept { return prompts ? prompts : num_classes; }
  std::size_t output_width(std::size_t num_classes) const noexcept;
  std::size_t input_width(std::size_t feature_dim) const noexcept;
  std::vector<std::size_t> widths(std::size_t feature_dim, std::size_t num_classes) const;

  /// Canonical key=value lines, in a fixed order.
  std::vector<std::pair<std::string, std::string>> to_key_values() const;
  std::string to_text() const;
};

/// Sets one field from its config-file key. Throws InvalidArgument on an
/// unknown key or unparsable value.
void apply_config_value(TrainConfig& cfg, std::string_view key, std::string_view value);

/// Flat key=value lines; '#' starts a comment, [section] headers and quotes
/// around values are ignored (a TOML-compatible subset).
std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& in);
std::vector<std::pair<std::string, std::string>> read_key_value_file(const std::filesystem::path& path);

}  // namespace pgcn
