#include <cmath>
#include <sstream>

#include "doctest.h"
#include "pgcn/checkpoint.hpp"
#include "pgcn/config.hpp"
#include "pgcn/error.hpp"
#include "pgcn/generator.hpp"
#include "pgcn/trainer.hpp"
#include "support.hpp"

using namespace pgcn;

namespace {

const Dataset& small_sbm() {
  static const Dataset d = [] {
    SbmParams p;
    p.blocks = 3;
    p.nodes_per_block = 40;
    p.p_in = 0.2;
    p.p_out = 0.01;
    p.feature_dim = 6;
    p.seed = 2;
    return generate_sbm(p);
  }();
  return d;
}

TrainConfig quick_config() {
  TrainConfig cfg;
  cfg.clusters = 3;
  cfg.epochs = 5;
  cfg.hidden = 8;
  cfg.layers = 2;
  cfg.lr = 0.01;
  return cfg;
}

// Softmax regression on raw features by plain gradient descent.
double logistic_regression_accuracy(const Dataset& d) {
  const std::size_t k = d.labels.num_classes, f = d.feature_dim();
  DenseMatrix w(f + 1, k);
  for (int it = 0; it < 300; ++it) {
    DenseMatrix grad(f + 1, k);
    std::size_t count = 0;
    for (std::size_t i = 0; i < d.num_nodes(); ++i) {
      if (!d.labels.train[i]) continue;
      ++count;
      std::vector<double> z(k, 0.0);
      for (std::size_t c = 0; c < k; ++c) {
        z[c] = w(f, c);
        for (std::size_t j = 0; j < f; ++j) z[c] += d.features(i, j) * w(j, c);
      }
      const double mx = *std::max_element(z.begin(), z.end());
      double s = 0.0;
      for (double& v : z) s += (v = std::exp(v - mx));
      for (std::size_t c = 0; c < k; ++c) {
        const double g = z[c] / s - (d.labels.labels[i] == c ? 1.0 : 0.0);
        grad(f, c) += g;
        for (std::size_t j = 0; j < f; ++j) grad(j, c) += g * d.features(i, j);
      }
    }
    for (std::size_t q = 0; q < w.size(); ++q) w.values()[q] -= 0.5 * grad.values()[q] / static_cast<double>(count);
  }
  std::size_t correct = 0, total = 0;
  for (std::size_t i = 0; i < d.num_nodes(); ++i) {
    if (!d.labels.test[i]) continue;
    ++total;
    std::size_t best = 0;
    double best_z = -1e300;
    for (std::size_t c = 0; c < k; ++c) {
      double z = w(f, c);
      for (std::size_t j = 0; j < f; ++j) z += d.features(i, j) * w(j, c);
      if (z > best_z) {
        best_z = z;
        best = c;
      }
    }
    correct += best == d.labels.labels[i];
  }
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace

TEST_CASE("config validation and parsing") {
  TrainConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.lr = 0.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.dropout = 1.0;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
  cfg = {};
  cfg.alpha = -0.1;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);

  std::istringstream text("# run\n[train]\nlr = 0.01\nmode = \"weighted\"\nalpha=1.0\nc = 4\n");
  TrainConfig parsed;
  for (const auto& [k, v] : parse_key_values(text)) apply_config_value(parsed, k, v);
  CHECK(parsed.lr == 0.01);
  CHECK(parsed.mode == AttachMode::weighted);
  CHECK(parsed.alpha == 1.0);
  CHECK(parsed.clusters == 4);
  CHECK_THROWS_AS(apply_config_value(parsed, "learning_rate", "1"), InvalidArgument);
  CHECK_THROWS_AS(apply_config_value(parsed, "epochs", "ten"), InvalidArgument);

  // to_text is read back to the same config.
  std::istringstream again(parsed.to_text());
  TrainConfig round;
  for (const auto& [k, v] : parse_key_values(again)) apply_config_value(round, k, v);
  CHECK(round.to_text() == parsed.to_text());
}

TEST_CASE("training is deterministic in the seed") {
  const auto a = train(small_sbm(), quick_config()).report;
  const auto b = train(small_sbm(), quick_config()).report;
  REQUIRE(a.epochs.size() == b.epochs.size());
  for (std::size_t e = 0; e < a.epochs.size(); ++e) {
    CHECK(a.epochs[e].subgraph_losses == b.epochs[e].subgraph_losses);
    CHECK(a.epochs[e].val_metric == b.epochs[e].val_metric);
  }
  CHECK(a.accuracy == b.accuracy);
  CHECK(a.macro_f1 == b.macro_f1);

  TrainConfig other = quick_config();
  other.seed = 1;
  CHECK_FALSE(train(small_sbm(), other).report.epochs[0].subgraph_losses == a.epochs[0].subgraph_losses);
}

TEST_CASE("a shared pool carries updates from one subgraph to the next") {
  TrainConfig cfg = quick_config();
  cfg.epochs = 2;
  const PromptBank init(PromptSharing::shared, 3, 3, small_sbm().feature_dim(),
                        derive_seed(cfg.seed, Stream::prompt_init));
  std::vector<StepEvent> events;
  std::vector<DenseMatrix> seen;
  TrainHooks hooks;
  hooks.on_step_begin = [&](const StepEvent& e) {
    events.push_back(e);
    seen.push_back(e.pool->values());
  };
  train(small_sbm(), cfg, hooks);
  REQUIRE(events.size() == 6);
  CHECK(seen[0] == init.pool_for(0)->values());
  for (std::size_t i = 1; i < events.size(); ++i) {
    CHECK(events[i].pool == events[0].pool);
    CHECK(events[i].pool_version == events[i - 1].pool_version + 1);
    CHECK_FALSE(seen[i] == seen[i - 1]);
  }

  cfg.sharing = PromptSharing::isolated;
  events.clear();
  hooks.on_step_begin = [&](const StepEvent& e) { events.push_back(e); };
  train(small_sbm(), cfg, hooks);
  REQUIRE(events.size() == 6);
  CHECK(events[0].pool != events[1].pool);
  CHECK(events[1].pool != events[2].pool);
  CHECK(events[3].pool == events[0].pool);
  CHECK(events[3].pool_version == 1);
}

TEST_CASE("parameter counts") {
  TrainConfig cfg = quick_config();
  cfg.epochs = 0;
  cfg.mode = AttachMode::add;
  const std::size_t md = 3 * small_sbm().feature_dim();
  for (const std::size_t c : {1u, 2u, 5u}) {
    cfg.clusters = c;
    cfg.sharing = PromptSharing::shared;
    CHECK(train(small_sbm(), cfg).report.prompt_parameters == md);
    cfg.sharing = PromptSharing::isolated;
    CHECK(train(small_sbm(), cfg).report.prompt_parameters == c * md);
    cfg.sharing = PromptSharing::none;
    CHECK(train(small_sbm(), cfg).report.prompt_parameters == 0);
  }
  cfg.prompts = 7;
  cfg.sharing = PromptSharing::shared;
  CHECK(train(small_sbm(), cfg).report.prompt_parameters == 7 * small_sbm().feature_dim());
}

TEST_CASE("zero epochs scores the untrained model") {
  const Dataset d = generate_sbm(testing::reference_sbm());
  TrainConfig cfg;
  cfg.epochs = 0;
  std::vector<double> acc;
  for (std::uint64_t s = 0; s < 5; ++s) {
    cfg.seed = s;
    const auto r = train(d, cfg);
    CHECK(r.report.epochs.empty());
    CHECK(r.report.best_epoch == 0);
    acc.push_back(r.report.accuracy);
  }
  CHECK(testing::mean(acc) == doctest::Approx(0.25).epsilon(0.6));
}

TEST_CASE("two separable blocks are learned") {
  SbmParams p;
  p.blocks = 2;
  p.nodes_per_block = 200;
  p.p_in = 0.05;
  p.p_out = 0.005;
  p.feature_dim = 16;
  p.feature_shift = 4.0;
  p.seed = 3;
  const Dataset d = generate_sbm(p);
  REQUIRE(logistic_regression_accuracy(d) >= 0.95);

  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.clusters = 2;
  CHECK(train(d, cfg).report.accuracy >= 0.95);
}

TEST_CASE("checkpoints reproduce the reported test metrics") {
  TrainConfig cfg = quick_config();
  cfg.sharing = PromptSharing::isolated;
  const auto r = train(small_sbm(), cfg);
  std::stringstream buf;
  write_checkpoint(buf, Checkpoint{r.params, r.prompts, 0xabcdefULL});
  const Checkpoint back = read_checkpoint(buf);
  CHECK(back.manifest_hash == 0xabcdefULL);
  CHECK(back.params.weights == r.params.weights);
  REQUIRE(back.prompts.num_pools() == r.prompts.num_pools());
  for (std::size_t i = 0; i < back.prompts.num_pools(); ++i) {
    CHECK(back.prompts.pools()[i].values() == r.prompts.pools()[i].values());
  }
  const auto e = evaluate(small_sbm(), cfg, back.params, back.prompts);
  CHECK(e.accuracy == r.report.accuracy);
  CHECK(e.macro_f1 == r.report.macro_f1);
  CHECK(e.best_val_metric == r.report.best_val_metric);

  std::stringstream bad("PGCNM2");
  CHECK_THROWS_AS(read_checkpoint(bad), FormatError);
}

TEST_CASE("divergence names the step") {
  TrainConfig cfg = quick_config();
  cfg.lr = 1e300;
  try {
    train(small_sbm(), cfg);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.epoch() >= 1);
    CHECK(e.subgraph() < 3);
    CHECK(std::string(e.what()).find("subgraph") != std::string::npos);
  }
}

TEST_CASE("link prediction trains") {
  TrainConfig cfg = quick_config();
  cfg.task = Task::link_prediction;
  cfg.epochs = 3;
  cfg.eval_negatives = 20;
  const auto r = train(small_sbm(), cfg).report;
  CHECK(r.mrr > 0.0);
  CHECK(r.mrr <= 1.0);
  CHECK(r.hits_at_k >= 0.0);
  CHECK(r.hits_at_k <= 1.0);
  for (const auto& e : r.epochs) {
    for (const auto& l : e.subgraph_losses) {
      if (l) CHECK(std::isfinite(*l));
    }
  }
}

TEST_CASE("memory estimates in reports") {
  const Dataset d = generate_sbm(testing::reference_sbm());
  TrainConfig cfg;
  cfg.clusters = 1;
  CHECK(estimate_memory(d, cfg) == train(d, [&] {
          auto c = cfg;
          c.epochs = 0;
          return c;
        }()).report.full_batch_memory_bytes);
  cfg.clusters = 6;
  TrainConfig full = cfg;
  full.clusters = 1;
  CHECK(estimate_memory(d, cfg) < estimate_memory(d, full));
  TrainConfig wide = cfg;
  wide.hidden = 128;
  CHECK(estimate_memory(d, wide) > estimate_memory(d, cfg));
}
