// Times the OpenMP kernels against their serial references on a random
// sparse graph and dense operands. Prints one line per kernel.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "pgcn/generator.hpp"
#include "pgcn/kernels.hpp"
#include "pgcn/model.hpp"
#include "pgcn/rng.hpp"

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

pgcn::DenseMatrix random_matrix(std::size_t rows, std::size_t cols, pgcn::Rng& rng) {
  pgcn::DenseMatrix m(rows, cols);
  for (auto& v : m.values()) v = rng.normal(0.0, 1.0);
  return m;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 4000;
  const std::size_t d = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 64;
  const int reps = 5;

  pgcn::SbmParams p;
  p.blocks = 4;
  p.nodes_per_block = n / 4;
  p.p_in = 20.0 / static_cast<double>(p.nodes_per_block);
  p.p_out = p.p_in / 20.0;
  p.feature_dim = 8;
  p.seed = 7;
  const auto data = pgcn::generate_sbm(p);
  const auto adj = pgcn::normalize_adjacency(data.graph);

  pgcn::Rng rng(11);
  const auto x = random_matrix(adj.n, d, rng);
  const auto w = random_matrix(d, d, rng);

  std::printf("threads=%d n=%zu nnz=%zu d=%zu (best of %d, ms)\n", pgcn::kernels::max_threads(), adj.n, adj.nnz(), d,
              reps);
  const auto row = [](const char* name, double serial, double parallel) {
    std::printf("%-12s serial %9.3f  parallel %9.3f  speedup %5.2fx\n", name, serial, parallel, serial / parallel);
  };
  namespace k = pgcn::kernels;
  row("matmul", best_of(reps, [&] { (void)k::serial::matmul(x, w); }), best_of(reps, [&] { (void)k::matmul(x, w); }));
  row("matmul_at_b", best_of(reps, [&] { (void)k::serial::matmul_at_b(x, x); }),
      best_of(reps, [&] { (void)k::matmul_at_b(x, x); }));
  row("matmul_a_bt", best_of(reps, [&] { (void)k::serial::matmul_a_bt(x, w); }),
      best_of(reps, [&] { (void)k::matmul_a_bt(x, w); }));
  row("spmm", best_of(reps, [&] { (void)k::serial::spmm(adj, x); }), best_of(reps, [&] { (void)k::spmm(adj, x); }));
  return 0;
}
