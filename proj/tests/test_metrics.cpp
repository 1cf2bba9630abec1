#include <cmath>

#include "doctest.h"
#include "pgcn/error.hpp"
#include "pgcn/generator.hpp"
#include "pgcn/memory.hpp"
#include "pgcn/metrics.hpp"
#include "pgcn/optim.hpp"
#include "pgcn/partition.hpp"
#include "support.hpp"

using namespace pgcn;

TEST_CASE("classification metrics") {
  const std::vector<std::uint8_t> all4(4, 1);
  const std::vector<std::uint32_t> y{0, 1, 0, 1};
  const auto perfect = evaluate_classification(y, y, all4, 2);
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.macro_f1 == 1.0);

  const std::vector<std::uint32_t> three{0, 1, 0, 0};
  CHECK(evaluate_classification(three, y, all4, 2).accuracy == 0.75);

  const std::vector<std::uint32_t> preds{0, 0, 1, 1}, labels{0, 1, 0, 1};
  const auto half = evaluate_classification(preds, labels, all4, 2);
  CHECK(half.accuracy == 0.5);
  CHECK(half.macro_f1 == doctest::Approx(0.5));

  // A class missing from the mask contributes F1 = 0.
  CHECK(evaluate_classification(y, y, all4, 3).macro_f1 == doctest::Approx(2.0 / 3.0));

  const std::vector<std::uint8_t> masked{1, 0, 0, 1};
  CHECK(evaluate_classification(three, y, masked, 2).accuracy == 0.5);
  CHECK_THROWS_AS(evaluate_classification(y, y, std::vector<std::uint8_t>(4, 0), 2), InvalidArgument);

  const auto logits = DenseMatrix::from_rows({{1, 1}, {0, 2}});
  CHECK(predict_classes(logits) == std::vector<std::uint32_t>{0, 1});
}

TEST_CASE("link metrics") {
  const std::vector<double> pos{5, 5};
  const auto neg = DenseMatrix::from_rows({{1, 2, 3}, {0, 0, 0}});
  const auto top = evaluate_link(pos, neg, 1);
  CHECK(top.mrr == 1.0);
  CHECK(top.hits_at_k == 1.0);

  // ranks 1, 2, 4
  const std::vector<double> p3{3, 3, 3};
  const auto n3 = DenseMatrix::from_rows({{0, 0, 0}, {4, 0, 0}, {4, 5, 3}});
  const auto r = evaluate_link(p3, n3, 2);
  CHECK(r.mrr == doctest::Approx((1.0 + 0.5 + 0.25) / 3.0));
  CHECK(r.hits_at_k == doctest::Approx(2.0 / 3.0));

  const std::vector<double> tie{1};
  CHECK(evaluate_link(tie, DenseMatrix::from_rows({{1}}), 1).mrr == 0.5);
  CHECK_THROWS_AS(evaluate_link(std::vector<double>{}, DenseMatrix(), 1), InvalidArgument);
}

TEST_CASE("adam") {
  AdamOptions opt;
  opt.lr = 0.01;
  DenseMatrix w = DenseMatrix::from_rows({{1.5, -2.0}});
  AdamState state;
  adam_step(w, DenseMatrix(1, 2), state, opt);
  CHECK(w == DenseMatrix::from_rows({{1.5, -2.0}}));

  DenseMatrix x(1, 1, 1.0);
  AdamState sx;
  adam_step(x, DenseMatrix(1, 1, 3.0), sx, opt);
  // Step 1: m̂ = g, v̂ = g², so the move is lr·g/(|g| + eps).
  CHECK(x(0, 0) == doctest::Approx(1.0 - 0.01 * 3.0 / (3.0 + 1e-8)).epsilon(1e-14));
  for (int i = 0; i < 9; ++i) adam_step(x, DenseMatrix(1, 1, 3.0), sx, opt);
  CHECK(x(0, 0) == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(sx.step == 10);

  AdamOptions decay = opt;
  decay.weight_decay = 0.1;
  DenseMatrix d = DenseMatrix::from_rows({{2.0, -2.0}});
  AdamState sd;
  for (int i = 0; i < 5; ++i) adam_step(d, DenseMatrix(1, 2), sd, decay);
  CHECK(d(0, 0) < 2.0);
  CHECK(d(0, 0) > 0.0);
  CHECK(d(0, 1) > -2.0);
}

TEST_CASE("memory estimate") {
  MemoryShape s;
  s.batch_nodes = 10;
  s.adjacency_nnz = 30;
  s.widths = {4, 3, 2};
  s.prompt_params = 8;
  // 8 · [2·10·(3+2) + 3·(12+6) + 3·8 + 2·30]
  CHECK(estimate_memory(s) == 8 * (100 + 54 + 24 + 60));

  const Dataset d = generate_sbm(testing::reference_sbm());
  const std::vector<std::size_t> w3{64, 64, 64, 4}, w6{64, 64, 64, 64, 64, 64, 4};
  PartitionAssignment one;
  one.num_clusters = 1;
  one.cluster_of.assign(d.num_nodes(), 0);
  const auto full = estimate_step_memory(d.graph, one, w3, 128);
  CHECK(estimate_step_memory(d.graph, partition(d.graph, 1, PartitionStrategy::degree_ldg, 0), w3, 128) == full);
  CHECK(estimate_step_memory(d.graph, one, w6, 128) > full);

  SUBCASE("c = 6 activations are about a sixth of c = 1") {
    const auto p = partition(d.graph, 6, PartitionStrategy::degree_ldg, 0);
    MemoryShape a;
    a.widths = w3;
    const auto sizes = p.sizes();
    a.batch_nodes = *std::max_element(sizes.begin(), sizes.end());
    MemoryShape b = a;
    b.batch_nodes = d.num_nodes();
    const double act = static_cast<double>(estimate_memory(a) - estimate_memory(MemoryShape{0, 0, w3, 0}));
    const double act_full = static_cast<double>(estimate_memory(b) - estimate_memory(MemoryShape{0, 0, w3, 0}));
    CHECK(act / act_full == doctest::Approx(1.0 / 6.0).epsilon(0.2));
  }
}
