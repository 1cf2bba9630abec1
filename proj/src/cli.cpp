#include "pgcn/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "pgcn/checkpoint.hpp"
#include "pgcn/config.hpp"
#include "pgcn/error.hpp"
#include "pgcn/generator.hpp"
#include "pgcn/graph_io.hpp"
#include "pgcn/kernels.hpp"
#include "pgcn/manifest.hpp"
#include "pgcn/memory.hpp"
#include "pgcn/partition.hpp"
#include "pgcn/rng.hpp"
#include "pgcn/trainer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace pgcn::cli {

namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

// Train-config flags: flag name -> config key. Values are kept as raw text and
// applied on top of the config file, so flag > file > default.
struct ConfigFlags {
  std::map<std::string, std::string> raw;
  std::vector<std::pair<CLI::Option*, std::string>> options;
  std::string config_file;

  void add(CLI::App& app, const std::string& flag, const std::string& key, const std::string& help) {
    options.emplace_back(app.add_option(flag, raw[key], help), key);
  }

  void attach(CLI::App& app) {
    app.add_option("--config", config_file, "key=value config file (flags override it)");
    add(app, "--task", "task", "node | link");
    add(app, "--mode", "mode", "prompt attachment: concat | add | mul | weighted");
    add(app, "--prompts", "sharing", "prompt sharing: none | shared | isolated");
    add(app, "--num-prompts", "num_prompts", "prompt count M (0 = number of classes)");
    add(app, "--c,--clusters", "clusters", "number of subgraphs");
    add(app, "--strategy", "strategy", "random_balanced | greedy_bfs | degree_ldg");
    add(app, "--lr", "lr", "learning rate");
    add(app, "--dropout", "dropout", "dropout rate on hidden layers");
    add(app, "--weight-decay", "weight_decay", "L2 weight decay");
    add(app, "--gamma", "gamma", "orthogonality regularizer weight");
    add(app, "--alpha", "alpha", "feature weight in weighted attachment");
    add(app, "--layers", "layers", "GCN depth");
    add(app, "--hidden", "hidden", "hidden width");
    add(app, "--epochs", "epochs", "training epochs");
    add(app, "--seed", "seed", "run seed");
    add(app, "--bias", "bias", "use per-layer biases (true|false)");
    add(app, "--shuffle-subgraphs", "shuffle_subgraphs", "shuffle subgraph order per epoch");
    add(app, "--ortho-for-link", "ortho_for_link", "apply the orthogonality term in link prediction");
    add(app, "--embedding-dim", "embedding_dim", "link-prediction embedding width (0 = hidden)");
    add(app, "--eval-negatives", "eval_negatives", "negatives per held-out edge");
    add(app, "--hits-k", "hits_k", "k for Hits@k");
  }

  TrainConfig resolve() const {
    TrainConfig cfg;
    if (!config_file.empty()) {
      std::vector<std::pair<std::string, std::string>> entries;
      try {
        entries = read_key_value_file(config_file);
      } catch (const ParseError& e) {
        throw UsageError("config file " + config_file + ": " + e.what());
      }
      for (const auto& [k, v] : entries) apply_config_value(cfg, k, v);
    }
    for (const auto& [opt, key] : options) {
      if (opt->count() > 0) apply_config_value(cfg, key, raw.at(key));
    }
    cfg.validate();
    return cfg;
  }
};

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::size_t parse_count(const std::string& s) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    throw UsageError("expected a non-negative integer, got '" + s + "'");
  }
  if (pos != s.size()) throw UsageError("expected a non-negative integer, got '" + s + "'");
  return static_cast<std::size_t>(v);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write failed: " + path.string());
}

std::map<std::string, std::string> dataset_hashes(const fs::path& dir) {
  const auto paths = DatasetPaths::in(dir);
  return {{"edges", hex64(hash_file(paths.edges))},
          {"features", hex64(hash_file(paths.features))},
          {"labels", hex64(hash_file(paths.labels))}};
}

json losses_json(const EpochRecord& r) {
  json arr = json::array();
  for (const auto& l : r.subgraph_losses) arr.push_back(l ? json(*l) : json(nullptr));
  return arr;
}

json summary_json(const MetricsReport& r, const TrainConfig& cfg, const std::string& manifest_hash) {
  json j;
  j["task"] = std::string(to_string(cfg.task));
  if (cfg.task == Task::node_classification) {
    j["accuracy"] = r.accuracy;
    j["macro_f1"] = r.macro_f1;
  } else {
    j["mrr"] = r.mrr;
    j["hits_at_k"] = r.hits_at_k;
    j["hits_k"] = r.hits_k;
  }
  j["best_epoch"] = r.best_epoch;
  j["best_val_metric"] = r.best_val_metric;
  j["epochs"] = r.epochs.size();
  j["memory_bytes"] = r.memory_bytes;
  j["full_batch_memory_bytes"] = r.full_batch_memory_bytes;
  j["model_parameters"] = r.model_parameters;
  j["prompt_parameters"] = r.prompt_parameters;
  j["edge_cut"] = r.edge_cut;
  j["negative_fallbacks"] = r.negative_fallbacks;
  j["full_batch_equivalent"] = cfg.clusters == 1 && cfg.sharing == PromptSharing::none;
  j["wall_seconds"] = r.wall_seconds;
  j["manifest"] = manifest_hash;
  return j;
}

int cmd_gen(const SbmParams& params, const fs::path& out_dir, bool force, std::ostream& out) {
  if (params.blocks == 0 || params.nodes_per_block == 0) throw UsageError("gen: --blocks and --per-block must be positive");
  if (params.feature_dim == 0) throw UsageError("gen: --dim must be positive");
  if (!(params.p_in >= 0.0 && params.p_in <= 1.0 && params.p_out >= 0.0 && params.p_out <= params.p_in)) {
    throw UsageError("gen: need 0 <= p_out <= p_in <= 1");
  }
  const auto paths = DatasetPaths::in(out_dir);
  if (!force) {
    for (const auto& p : {paths.edges, paths.features, paths.labels, paths.manifest}) {
      if (fs::exists(p)) throw UsageError("gen: " + p.string() + " exists (use --force to overwrite)");
    }
  }
  fs::create_directories(out_dir);
  const Dataset data = generate_sbm(params);
  save_dataset(out_dir, data);

  RunManifest m;
  m.command = "gen";
  std::ostringstream cfg;
  cfg << "blocks = " << params.blocks << "\nper_block = " << params.nodes_per_block << "\np_in = " << params.p_in
      << "\np_out = " << params.p_out << "\ndim = " << params.feature_dim << "\nshift = " << params.feature_shift
      << "\n";
  m.config = cfg.str();
  m.seed = params.seed;
  m.outputs = {{"edges", paths.edges.string()}, {"features", paths.features.string()}, {"labels", paths.labels.string()}};
  for (const auto& [k, v] : dataset_hashes(out_dir)) m.inputs["generated_" + k] = v;
  write_text(paths.manifest, m.to_json() + "\n");
  out << "wrote " << data.num_nodes() << " nodes, " << data.graph.num_edges() << " edges, d=" << data.feature_dim()
      << " to " << out_dir.string() << "\n";
  return kOk;
}

int cmd_partition(const fs::path& data_dir, const fs::path& edges, std::size_t nodes, std::size_t c,
                  const std::string& strategy, std::uint64_t seed, const fs::path& out_path, std::ostream& out) {
  Graph g;
  std::map<std::string, std::string> inputs;
  if (!data_dir.empty()) {
    g = load_dataset(data_dir).graph;
    inputs = dataset_hashes(data_dir);
  } else {
    if (edges.empty() || nodes == 0) throw UsageError("partition: give --data, or --edges with --nodes");
    g = load_edge_list(edges, nodes);
    inputs["edges"] = hex64(hash_file(edges));
  }
  const auto s = parse_partition_strategy(strategy);
  const auto p = partition(g, c, s, seed);
  const auto report = verify_partition(g, p);
  if (!report.ok()) throw InvalidState("partition: produced an invalid assignment: " + report.failures.front());

  RunManifest m;
  m.command = "partition";
  m.config = "clusters = " + std::to_string(c) + "\nstrategy = " + std::string(to_string(s)) + "\n";
  m.seed = seed;
  m.inputs = inputs;
  const fs::path summary_path = out_path.string() + ".json";
  m.outputs = {{"partition", out_path.string()}, {"summary", summary_path.string()}};

  save_partition_file(out_path, p.cluster_of);
  json j = {{"c", p.num_clusters}, {"sizes", p.sizes()}, {"edge_cut", p.edge_cut},
            {"strategy", std::string(to_string(s))}, {"seed", seed}, {"manifest", hex64(m.hash())}};
  write_text(summary_path, j.dump(2) + "\n");
  out << j.dump() << "\n";
  return kOk;
}

int cmd_train(const fs::path& data_dir, const TrainConfig& cfg, const fs::path& out_dir, std::ostream& out) {
  const Dataset data = load_dataset(data_dir);
  fs::create_directories(out_dir);

  RunManifest m;
  m.command = "train";
  m.config = cfg.to_text();
  m.inputs = dataset_hashes(data_dir);
  m.seed = cfg.seed;
  const fs::path jsonl = out_dir / "metrics.jsonl";
  const fs::path summary = out_dir / "summary.json";
  const fs::path ckpt = out_dir / "model.ckpt";
  const fs::path config = out_dir / "config.toml";
  m.outputs = {{"metrics", jsonl.string()}, {"summary", summary.string()}, {"checkpoint", ckpt.string()},
               {"config", config.string()}};
  const std::string hash = hex64(m.hash());

  std::ofstream stream(jsonl, std::ios::binary | std::ios::trunc);
  if (!stream) throw IoError("cannot open " + jsonl.string() + " for writing");
  TrainHooks hooks;
  hooks.on_epoch_end = [&](const EpochRecord& r) {
    json j = {{"epoch", r.epoch},
              {"subgraph_losses", losses_json(r)},
              {"val_metric", r.val_metric},
              {"memory_bytes", r.memory_bytes},
              {"manifest", hash}};
    stream << j.dump() << '\n';
  };
  const TrainResult result = train(data, cfg, hooks);
  stream.flush();
  if (!stream) throw IoError("write failed: " + jsonl.string());

  save_checkpoint(ckpt, Checkpoint{result.params, result.prompts, m.hash()});
  write_text(config, cfg.to_text());
  write_text(out_dir / "manifest.json", m.to_json() + "\n");
  const json s = summary_json(result.report, cfg, hash);
  write_text(summary, s.dump(2) + "\n");
  out << s.dump() << "\n";
  return kOk;
}

int cmd_eval(const fs::path& data_dir, const fs::path& run_dir, const fs::path& checkpoint, std::ostream& out) {
  TrainConfig cfg;
  for (const auto& [k, v] : read_key_value_file(run_dir / "config.toml")) apply_config_value(cfg, k, v);
  cfg.validate();
  const Dataset data = load_dataset(data_dir);
  const Checkpoint ckpt = load_checkpoint(checkpoint.empty() ? run_dir / "model.ckpt" : checkpoint);
  const MetricsReport r = evaluate(data, cfg, ckpt.params, ckpt.prompts);
  json j = {{"task", std::string(to_string(cfg.task))}, {"val_metric", r.best_val_metric},
            {"checkpoint_manifest", hex64(ckpt.manifest_hash)}};
  if (cfg.task == Task::node_classification) {
    j["accuracy"] = r.accuracy;
    j["macro_f1"] = r.macro_f1;
  } else {
    j["mrr"] = r.mrr;
    j["hits_at_k"] = r.hits_at_k;
    j["hits_k"] = r.hits_k;
  }
  out << j.dump() << "\n";
  return kOk;
}

void set_axis_value(TrainConfig& cfg, const std::string& axis, const std::string& value) {
  if (axis == "prompts") {
    cfg.prompts = parse_count(value);
    if (cfg.prompts == 0) throw UsageError("bench: prompt counts must be positive");
  } else if (axis == "modes") {
    cfg.mode = parse_attach_mode(value);
  } else if (axis == "subgraphs") {
    cfg.clusters = parse_count(value);
  } else if (axis == "layers") {
    cfg.layers = parse_count(value);
  } else if (axis == "sharing") {
    cfg.sharing = parse_prompt_sharing(value);
  } else {
    throw UsageError("bench: unknown axis '" + axis + "' (prompts | modes | subgraphs | layers | sharing)");
  }
}

std::vector<std::string> default_axis_values(const std::string& axis) {
  if (axis == "prompts") return {"1", "2", "4", "8", "16"};
  if (axis == "modes") return {"concat", "add", "mul", "weighted"};
  if (axis == "subgraphs") return {"5", "10", "20", "100"};
  if (axis == "layers") return {"2", "3", "4", "5"};
  if (axis == "sharing") return {"none", "shared", "isolated"};
  throw UsageError("bench: unknown axis '" + axis + "' (prompts | modes | subgraphs | layers | sharing)");
}

int cmd_bench(const fs::path& data_dir, TrainConfig base, const std::string& axis, const std::string& values_text,
              std::size_t seeds, std::size_t jobs, const fs::path& csv_path, std::ostream& out) {
  const auto values = values_text.empty() ? default_axis_values(axis) : split_list(values_text);
  if (values.empty()) throw UsageError("bench: empty --values");
  if (seeds == 0) throw UsageError("bench: --seeds must be positive");
  std::vector<TrainConfig> cells;
  for (const auto& v : values) {
    TrainConfig cfg = base;
    set_axis_value(cfg, axis, v);
    cfg.validate();
    for (std::size_t s = 0; s < seeds; ++s) {
      TrainConfig run = cfg;
      run.seed = base.seed + s;
      cells.push_back(run);
    }
  }
  const Dataset data = load_dataset(data_dir);

  std::vector<double> metric(cells.size(), 0.0);
  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  const auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      try {
        const auto r = train(data, cells[i]).report;
        metric[i] = cells[i].task == Task::node_classification ? r.accuracy : r.mrr;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t j = 1; j < std::max<std::size_t>(jobs, 1); ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);

  std::ostringstream csv;
  const char* metric_name = base.task == Task::node_classification ? "accuracy" : "mrr";
  csv << "axis,value,metric,mean,std,seeds\n";
  for (std::size_t v = 0; v < values.size(); ++v) {
    double mean = 0.0;
    for (std::size_t s = 0; s < seeds; ++s) mean += metric[v * seeds + s];
    mean /= static_cast<double>(seeds);
    double var = 0.0;
    for (std::size_t s = 0; s < seeds; ++s) var += std::pow(metric[v * seeds + s] - mean, 2);
    const double sd = seeds > 1 ? std::sqrt(var / static_cast<double>(seeds - 1)) : 0.0;
    csv << axis << ',' << values[v] << ',' << metric_name << ',' << mean << ',' << sd << ',' << seeds << '\n';
  }
  if (csv_path.empty()) {
    out << csv.str();
  } else {
    write_text(csv_path, csv.str());
    out << "wrote " << values.size() << " rows to " << csv_path.string() << "\n";
  }
  return kOk;
}

int cmd_memory(const fs::path& data_dir, TrainConfig cfg, const std::string& clusters_text,
               const std::string& layers_text, std::ostream& out) {
  const Dataset data = load_dataset(data_dir);
  std::vector<std::size_t> cluster_values;
  for (const auto& v : split_list(clusters_text)) cluster_values.push_back(parse_count(v));
  std::vector<std::size_t> layer_values;
  for (const auto& v : split_list(layers_text)) layer_values.push_back(parse_count(v));
  if (cluster_values.empty() || layer_values.empty()) throw UsageError("memory: empty --c or --layers list");

  out << "layers,config,clusters,bytes,megabytes\n";
  for (const std::size_t k : layer_values) {
    TrainConfig full = cfg;
    full.layers = k;
    full.clusters = 1;
    const std::size_t full_bytes = estimate_memory(data, full);
    out << k << ",full-batch,1," << full_bytes << ',' << static_cast<double>(full_bytes) / 1e6 << '\n';
    for (const std::size_t c : cluster_values) {
      TrainConfig sub = cfg;
      sub.layers = k;
      sub.clusters = c;
      const std::size_t bytes = estimate_memory(data, sub);
      out << k << ",subgraph," << c << ',' << bytes << ',' << static_cast<double>(bytes) / 1e6 << '\n';
    }
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Subgraph GCN training with shared prompt embeddings"};
  app.set_version_flag("--version", std::string(PGCN_VERSION));
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads for the kernels (0 = runtime default)");

  // gen
  auto* gen = app.add_subcommand("gen", "generate a stochastic-block-model dataset");
  SbmParams sbm;
  std::string gen_out = "data";
  bool force = false;
  gen->add_option("--blocks", sbm.blocks, "number of blocks (classes)");
  gen->add_option("--per-block", sbm.nodes_per_block, "nodes per block");
  gen->add_option("--p-in", sbm.p_in, "within-block edge probability");
  gen->add_option("--p-out", sbm.p_out, "between-block edge probability");
  gen->add_option("--dim", sbm.feature_dim, "feature dimension");
  gen->add_option("--shift", sbm.feature_shift, "feature mean shift along the block axis");
  gen->add_option("--seed", sbm.seed, "generator seed");
  gen->add_option("--out", gen_out, "output directory");
  gen->add_flag("--force", force, "overwrite existing files");

  // partition
  auto* part = app.add_subcommand("partition", "partition a graph into clusters");
  std::string part_data, part_edges, part_out = "partition.txt", part_strategy = "degree_ldg";
  std::size_t part_nodes = 0, part_c = 2;
  std::uint64_t part_seed = 0;
  part->add_option("--data", part_data, "dataset directory");
  part->add_option("--edges", part_edges, "edge list (with --nodes)");
  part->add_option("--nodes", part_nodes, "node count for --edges");
  part->add_option("--c,--clusters", part_c, "number of clusters");
  part->add_option("--strategy", part_strategy, "random_balanced | greedy_bfs | degree_ldg");
  part->add_option("--seed", part_seed, "partition seed");
  part->add_option("--out", part_out, "partition file (a .json summary is written next to it)");

  // train
  auto* tr = app.add_subcommand("train", "train a model");
  ConfigFlags train_flags;
  std::string train_data, train_out = "run";
  tr->add_option("--data", train_data, "dataset directory")->required();
  tr->add_option("--out", train_out, "run output directory");
  train_flags.attach(*tr);

  // eval
  auto* ev = app.add_subcommand("eval", "score a trained checkpoint");
  std::string eval_data, eval_run, eval_ckpt;
  ev->add_option("--data", eval_data, "dataset directory")->required();
  ev->add_option("--run", eval_run, "run directory written by train")->required();
  ev->add_option("--checkpoint", eval_ckpt, "checkpoint (default <run>/model.ckpt)");

  // bench
  auto* be = app.add_subcommand("bench", "ablation sweep over one axis");
  ConfigFlags bench_flags;
  std::string bench_data, bench_axis, bench_values, bench_out;
  std::size_t bench_seeds = 10, bench_jobs = 1;
  be->add_option("--data", bench_data, "dataset directory")->required();
  be->add_option("--axis", bench_axis, "prompts | modes | subgraphs | layers | sharing")->required();
  be->add_option("--values", bench_values, "comma-separated axis values");
  be->add_option("--seeds", bench_seeds, "seeds per cell");
  be->add_option("--jobs", bench_jobs, "cells trained in parallel");
  be->add_option("--csv", bench_out, "CSV output path (default stdout)");
  bench_flags.attach(*be);

  // memory
  auto* me = app.add_subcommand("memory", "analytic per-step memory, full batch vs subgraphs");
  ConfigFlags memory_flags;
  std::string memory_data, memory_clusters = "5", memory_layers = "3,4,5";
  me->add_option("--data", memory_data, "dataset directory")->required();
  me->add_option("--subgraphs", memory_clusters, "comma-separated cluster counts");
  me->add_option("--depths", memory_layers, "comma-separated layer counts");
  memory_flags.attach(*me);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (threads > 0) kernels::set_num_threads(threads);
    if (gen->parsed()) return cmd_gen(sbm, gen_out, force, out);
    if (part->parsed()) {
      return cmd_partition(part_data, part_edges, part_nodes, part_c, part_strategy, part_seed, part_out, out);
    }
    if (tr->parsed()) return cmd_train(train_data, train_flags.resolve(), train_out, out);
    if (ev->parsed()) return cmd_eval(eval_data, eval_run, eval_ckpt, out);
    if (be->parsed()) {
      return cmd_bench(bench_data, bench_flags.resolve(), bench_axis, bench_values, bench_seeds, bench_jobs,
                       bench_out, out);
    }
    if (me->parsed()) return cmd_memory(memory_data, memory_flags.resolve(), memory_clusters, memory_layers, out);
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const FormatError& e) {
    err << "bad file: " << e.what() << "\n";
    return kIo;
  } catch (const ParseError& e) {
    err << "bad file: " << e.what() << "\n";
    return kIo;
  } catch (const ValidationError& e) {
    err << "invalid dataset: " << e.what() << "\n";
    return kIo;
  } catch (const BoundsError& e) {
    err << "invalid dataset: " << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace pgcn::cli
