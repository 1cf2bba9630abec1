#include "pgcn/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "pgcn/error.hpp"

namespace pgcn {

std::string_view to_string(Task t) noexcept {
  return t == Task::node_classification ? "node" : "link";
}

Task parse_task(std::string_view name) {
  if (name == "node" || name == "node_classification") return Task::node_classification;
  if (name == "link" || name == "link_prediction") return Task::link_prediction;
  throw InvalidArgument("unknown task '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  const auto fail = [](const std::string& what) { throw InvalidArgument("config: " + what); };
  if (!(lr > 0.0) || !std::isfinite(lr)) fail("lr must be positive");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must lie in [0, 1)");
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) fail("weight_decay must be non-negative");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) fail("gamma must be non-negative");
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha must lie in [0, 1]");
  if (layers == 0) fail("layers must be positive");
  if (hidden == 0) fail("hidden must be positive");
  if (clusters == 0) fail("clusters must be positive");
  if (task == Task::link_prediction && eval_negatives == 0) fail("eval_negatives must be positive");
  if (hits_k == 0) fail("hits_k must be positive");
}

std::size_t TrainConfig::output_width(std::size_t num_classes) const noexcept {
  if (task == Task::node_classification) return num_classes;
  return embedding_dim ? embedding_dim : hidden;
}

std::size_t TrainConfig::input_width(std::size_t feature_dim) const noexcept {
  return sharing == PromptSharing::none ? feature_dim : fused_width(mode, feature_dim);
}

std::vector<std::size_t> TrainConfig::widths(std::size_t feature_dim, std::size_t num_classes) const {
  std::vector<std::size_t> w{input_width(feature_dim)};
  for (std::size_t l = 1; l < layers; ++l) w.push_back(hidden);
  w.push_back(output_width(num_classes));
  return w;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ec == std::errc{} ? ptr : buf);
}

double parse_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw InvalidArgument("config: '" + std::string(key) + "' expects a number, got '" + std::string(text) + "'");
  }
  return v;
}

std::uint64_t parse_uint(std::string_view key, std::string_view text) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw InvalidArgument("config: '" + std::string(key) + "' expects a non-negative integer, got '" +
                          std::string(text) + "'");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw InvalidArgument("config: '" + std::string(key) + "' expects a boolean, got '" + std::string(text) + "'");
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<std::pair<std::string, std::string>> TrainConfig::to_key_values() const {
  return {
      {"task", std::string(to_string(task))},
      {"lr", format_double(lr)},
      {"dropout", format_double(dropout)},
      {"weight_decay", format_double(weight_decay)},
      {"gamma", format_double(gamma)},
      {"alpha", format_double(alpha)},
      {"num_prompts", std::to_string(prompts)},
      {"layers", std::to_string(layers)},
      {"hidden", std::to_string(hidden)},
      {"epochs", std::to_string(epochs)},
      {"clusters", std::to_string(clusters)},
      {"strategy", std::string(to_string(strategy))},
      {"mode", std::string(to_string(mode))},
      {"sharing", std::string(to_string(sharing))},
      {"bias", bias ? "true" : "false"},
      {"shuffle_subgraphs", shuffle_subgraphs ? "true" : "false"},
      {"ortho_for_link", ortho_for_link ? "true" : "false"},
      {"embedding_dim", std::to_string(embedding_dim)},
      {"eval_negatives", std::to_string(eval_negatives)},
      {"hits_k", std::to_string(hits_k)},
      {"seed", std::to_string(seed)},
  };
}

std::string TrainConfig::to_text() const {
  std::string out;
  for (const auto& [k, v] : to_key_values()) out += k + " = " + v + "\n";
  return out;
}

void apply_config_value(TrainConfig& cfg, std::string_view key, std::string_view value) {
  if (key == "task") cfg.task = parse_task(value);
  else if (key == "lr") cfg.lr = parse_double(key, value);
  else if (key == "dropout") cfg.dropout = parse_double(key, value);
  else if (key == "weight_decay") cfg.weight_decay = parse_double(key, value);
  else if (key == "gamma") cfg.gamma = parse_double(key, value);
  else if (key == "alpha") cfg.alpha = parse_double(key, value);
  else if (key == "num_prompts") cfg.prompts = parse_uint(key, value);
  else if (key == "layers") cfg.layers = parse_uint(key, value);
  else if (key == "hidden") cfg.hidden = parse_uint(key, value);
  else if (key == "epochs") cfg.epochs = parse_uint(key, value);
  else if (key == "clusters" || key == "c") cfg.clusters = parse_uint(key, value);
  else if (key == "strategy") cfg.strategy = parse_partition_strategy(value);
  else if (key == "mode") cfg.mode = parse_attach_mode(value);
  else if (key == "sharing") cfg.sharing = parse_prompt_sharing(value);
  else if (key == "bias") cfg.bias = parse_bool(key, value);
  else if (key == "shuffle_subgraphs") cfg.shuffle_subgraphs = parse_bool(key, value);
  else if (key == "ortho_for_link") cfg.ortho_for_link = parse_bool(key, value);
  else if (key == "embedding_dim") cfg.embedding_dim = parse_uint(key, value);
  else if (key == "eval_negatives") cfg.eval_negatives = parse_uint(key, value);
  else if (key == "hits_k") cfg.hits_k = parse_uint(key, value);
  else if (key == "seed") cfg.seed = parse_uint(key, value);
  else throw InvalidArgument("config: unknown key '" + std::string(key) + "'");
}

std::vector<std::pair<std::string, std::string>> parse_key_values(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty() || s.front() == '[') continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
    auto key = trim(s.substr(0, eq));
    auto value = trim(s.substr(eq + 1));
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
      value = value.substr(1, value.size() - 2);
    }
    if (key.empty()) throw ParseError(line_no, "empty key");
    out.emplace_back(std::string(key), std::string(value));
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> read_key_value_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  return parse_key_values(in);
}

}  // namespace pgcn
