#include "doctest.h"
#include "pgcn/error.hpp"
#include "pgcn/prompt.hpp"
#include "pgcn/rng.hpp"
#include "support.hpp"

using namespace pgcn;

namespace {

std::size_t select(std::vector<double> h, DenseMatrix p) { return select_prompt(h, PromptPool(std::move(p))); }

std::size_t brute_force(std::span<const double> h, const DenseMatrix& p) {
  std::size_t best = 0;
  double best_dot = -1e300;
  for (std::size_t m = 0; m < p.rows(); ++m) {
    double dot = 0.0;
    for (std::size_t c = 0; c < h.size(); ++c) dot += h[c] * p(m, c);
    if (dot > best_dot) {
      best_dot = dot;
      best = m;
    }
  }
  return best;
}

}  // namespace

TEST_CASE("selection examples") {
  CHECK(select({1, 0}, DenseMatrix::from_rows({{2, 0}, {0, 3}})) == 0);
  CHECK(select({0, 0}, DenseMatrix::from_rows({{2, 0}, {0, 3}})) == 0);
  CHECK(select({1, 1}, DenseMatrix::from_rows({{1, 0}, {1, 1}})) == 1);
  CHECK_THROWS_AS(select({1}, DenseMatrix()), InvalidState);
  CHECK_THROWS_AS(select({1, 2, 3}, DenseMatrix(2, 2)), ShapeError);
}

TEST_CASE("selection matches brute force and is scale covariant") {
  Rng rng(17);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t m = 1 + rng.below(6), d = 1 + rng.below(5);
    DenseMatrix p(m, d);
    for (double& v : p.values()) v = static_cast<double>(rng.below(3)) - 1.0;
    std::vector<double> h(d);
    for (double& v : h) v = rng.normal(0.0, 1.0);
    const PromptPool pool(p);
    const std::size_t s = select_prompt(h, pool);
    CHECK(s == brute_force(h, p));
    const double lambda = 0.01 + 100.0 * rng.uniform();
    std::vector<double> scaled = h;
    for (double& v : scaled) v *= lambda;
    CHECK(select_prompt(scaled, pool) == s);
  }
}

TEST_CASE("attachment modes") {
  const std::vector<double> h{1, 2}, p{3, 4};
  CHECK(attach(h, p, AttachMode::concat) == std::vector<double>{1, 2, 3, 4});
  CHECK(attach(h, p, AttachMode::add) == std::vector<double>{4, 6});
  CHECK(attach(h, p, AttachMode::mul) == std::vector<double>{3, 8});
  CHECK(attach(h, p, AttachMode::weighted, 0.5) == std::vector<double>{2, 3});
  CHECK(attach(h, p, AttachMode::weighted, 1.0) == h);
  CHECK_THROWS_AS(attach(h, std::vector<double>{1}, AttachMode::add), ShapeError);
  CHECK_THROWS_AS(attach(h, p, AttachMode::weighted, 1.5), InvalidArgument);
  CHECK(fused_width(AttachMode::concat, 5) == 10);
  CHECK(fused_width(AttachMode::mul, 5) == 5);
}

TEST_CASE("orthogonality loss") {
  CHECK(orthogonality_loss(PromptPool(DenseMatrix::identity(2))) == doctest::Approx(0.0));
  CHECK(orthogonality_loss(PromptPool(DenseMatrix::from_rows({{1, 0}, {1, 0}}))) == doctest::Approx(2.0));
  CHECK(orthogonality_loss(PromptPool(DenseMatrix(4, 3))) == 4.0);

  SUBCASE("zero exactly for orthonormal rows") {
    const double s = std::sqrt(0.5);
    CHECK(orthogonality_loss(PromptPool(DenseMatrix::from_rows({{s, s, 0}, {s, -s, 0}}))) <= 1e-9);
    CHECK(orthogonality_loss(PromptPool(DenseMatrix::from_rows({{0, 0, 1}, {1, 0, 0}}))) <= 1e-9);
    CHECK(orthogonality_loss(PromptPool(DenseMatrix::from_rows({{1.01, 0}, {0, 1}}))) > 1e-9);
    CHECK(orthogonality_loss(PromptPool(DenseMatrix::from_rows({{1, 0.01}, {0, 1}}))) > 1e-9);
  }
}

TEST_CASE("batch select and attach") {
  const DenseMatrix h = testing::random_matrix(5, 3, 1);
  const auto single = batch_select_attach(h, PromptPool(testing::random_matrix(1, 3, 2)), AttachMode::concat);
  CHECK(single.values.cols() == 6);
  CHECK(single.selection == std::vector<std::size_t>(5, 0));

  const auto eye = batch_select_attach(DenseMatrix::identity(3), PromptPool(DenseMatrix::identity(3)), AttachMode::add);
  CHECK(eye.selection == std::vector<std::size_t>{0, 1, 2});

  const auto zero = batch_select_attach(h, PromptPool(DenseMatrix(2, 3)), AttachMode::add);
  CHECK(zero.values == h);
}

TEST_CASE("prompt banks") {
  const PromptBank none(PromptSharing::none, 4, 3, 5, 1);
  CHECK(none.num_pools() == 0);
  CHECK(none.pool_for(2) == nullptr);
  CHECK(none.parameter_count() == 0);

  PromptBank shared(PromptSharing::shared, 4, 3, 5, 1);
  CHECK(shared.num_pools() == 1);
  CHECK(shared.pool_for(0) == shared.pool_for(3));
  CHECK(shared.parameter_count() == 15);

  PromptBank isolated(PromptSharing::isolated, 4, 3, 5, 1);
  CHECK(isolated.num_pools() == 4);
  CHECK(isolated.pool_for(0) != isolated.pool_for(1));
  CHECK(isolated.parameter_count() == 60);
  CHECK(isolated.pool_for(0)->values() == shared.pool_for(0)->values());
  CHECK_FALSE(isolated.pool_for(1)->values() == isolated.pool_for(0)->values());

  const auto before = shared.pool_for(1)->version();
  shared.pool_for(1)->mutable_values()(0, 0) += 1.0;
  CHECK(shared.pool_for(2)->version() == before + 1);
}

TEST_CASE("random pool init has std 1/sqrt(d)") {
  const auto pool = PromptPool::random(200, 16, 5);
  double sq = 0.0;
  for (double v : pool.values().values()) sq += v * v;
  CHECK(std::sqrt(sq / 3200.0) == doctest::Approx(0.25).epsilon(0.05));
}
