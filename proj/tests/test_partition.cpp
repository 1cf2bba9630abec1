#include "doctest.h"
#include "pgcn/error.hpp"
#include "pgcn/generator.hpp"
#include "pgcn/partition.hpp"
#include "support.hpp"

using namespace pgcn;

namespace {

constexpr PartitionStrategy kAll[] = {PartitionStrategy::random_balanced, PartitionStrategy::greedy_bfs,
                                      PartitionStrategy::degree_ldg};

}  // namespace

TEST_CASE("partition examples") {
  const Graph g = testing::six_node_graph();
  for (const auto s : kAll) {
    const auto p = partition(g, 1, s, 3);
    CHECK(p.edge_cut == 0);
    CHECK(p.sizes() == std::vector<std::size_t>{6});
  }

  const Graph cliques = Graph::from_edges(4, std::vector<Edge>{{0, 1}, {2, 3}});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = partition(cliques, 2, PartitionStrategy::greedy_bfs, seed);
    CHECK(p.edge_cut == 0);
    CHECK(p.cluster_of[0] == p.cluster_of[1]);
    CHECK(p.cluster_of[2] == p.cluster_of[3]);
  }

  const Graph p3 = Graph::from_edges(3, std::vector<Edge>{{0, 1}, {1, 2}});
  for (const auto s : kAll) {
    const auto p = partition(p3, 3, s, 0);
    CHECK(p.edge_cut == 2);
    CHECK(p.sizes() == std::vector<std::size_t>{1, 1, 1});
  }

  CHECK_THROWS_AS(partition(p3, 4, PartitionStrategy::degree_ldg, 0), InvalidArgument);
  CHECK_THROWS_AS(partition(p3, 0, PartitionStrategy::degree_ldg, 0), InvalidArgument);
}

TEST_CASE("strategy names") {
  for (const auto s : kAll) CHECK(parse_partition_strategy(to_string(s)) == s);
  CHECK(parse_partition_strategy("ldg") == PartitionStrategy::degree_ldg);
  CHECK_THROWS_AS(parse_partition_strategy("metis"), InvalidArgument);
}

TEST_CASE("verify_partition reports failures") {
  const Graph g = testing::six_node_graph();
  auto p = partition(g, 2, PartitionStrategy::degree_ldg, 1);
  CHECK(verify_partition(g, p).ok());

  auto bad = p;
  bad.cluster_of[0] = 2;
  const auto r = verify_partition(g, bad);
  CHECK_FALSE(r.ok());
  CHECK_FALSE(r.in_range);
  CHECK(r.failures.front() == "cluster index out of range");

  auto wrong_cut = p;
  wrong_cut.edge_cut += 1;
  const auto r2 = verify_partition(g, wrong_cut);
  CHECK_FALSE(r2.edge_cut_ok);
  CHECK(r2.failures.front().rfind("edge_cut mismatch", 0) == 0);

  PartitionAssignment lopsided;
  lopsided.num_clusters = 2;
  lopsided.cluster_of = {0, 0, 0, 0, 0, 1};
  lopsided.edge_cut = count_edge_cut(g, lopsided.cluster_of);
  CHECK_FALSE(verify_partition(g, lopsided).balance);
}

TEST_CASE("partitions are deterministic in the seed") {
  const Dataset d = generate_sbm(testing::reference_sbm());
  for (const auto s : kAll) {
    CHECK(partition(d.graph, 6, s, 9).cluster_of == partition(d.graph, 6, s, 9).cluster_of);
  }
}

TEST_CASE("ldg cuts fewer edges than random on sbm graphs") {
  int wins = 0;
  for (std::uint64_t trial = 0; trial < 50; ++trial) {
    SbmParams p;
    p.blocks = 4;
    p.nodes_per_block = 50;
    p.p_in = 0.2;
    p.p_out = 0.01;
    p.feature_dim = 2;
    p.seed = trial;
    const Graph g = generate_sbm(p).graph;
    const auto ldg = partition(g, 4, PartitionStrategy::degree_ldg, trial);
    const auto rnd = partition(g, 4, PartitionStrategy::random_balanced, trial);
    wins += ldg.edge_cut <= rnd.edge_cut;
  }
  CHECK(wins >= 40);
}

TEST_CASE("greedy strategies never leave a cluster empty") {
  const Graph edgeless(7, std::vector<std::size_t>(8, 0), {});
  for (const auto s : kAll) {
    for (std::size_t c = 1; c <= 7; ++c) {
      const auto p = partition(edgeless, c, s, c);
      CHECK(verify_partition(edgeless, p).ok());
    }
  }
}
