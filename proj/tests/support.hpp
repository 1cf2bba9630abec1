#pragma once

// Fixtures and oracles shared by the unit tests and the acceptance binary.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "pgcn/dense.hpp"
#include "pgcn/generator.hpp"
#include "pgcn/graph.hpp"
#include "pgcn/model.hpp"
#include "pgcn/prompt.hpp"
#include "pgcn/rng.hpp"
#include "pgcn/tape.hpp"

namespace pgcn::testing {

/// Triangle 0-1-2 with a tail 2-3-4-5.
inline Graph six_node_graph() {
  const std::vector<Edge> edges{{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}, {4, 5}};
  return Graph::from_edges(6, edges);
}

inline DenseMatrix random_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  DenseMatrix m(rows, cols);
  for (double& v : m.values()) v = rng.normal(0.0, scale);
  return m;
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

inline double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

/// Sample standard deviation.
inline double stddev(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return v.size() > 1 ? std::sqrt(s / static_cast<double>(v.size() - 1)) : 0.0;
}

/// |a-n| / max(|a|, |n|, 1e-6), the worst entry over every parameter.
struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
};

/// Loss of a 2-layer prompt GCN on the six-node fixture, recorded on a tape.
/// Link task scores the pairs (0,1),(2,3),(4,5) against negatives 5,0,1.
struct GradFixture {
  Graph graph = six_node_graph();
  SparseMatrix adjacency = normalize_adjacency(graph);
  DenseMatrix features = random_matrix(6, 3, 101);
  std::vector<std::uint32_t> labels{0, 1, 2, 0, 1, 2};
  std::vector<std::size_t> rows{0, 1, 2, 3, 4, 5};
  std::vector<std::size_t> heads{0, 2, 4}, tails{1, 3, 5}, negatives{5, 0, 1};
  AttachMode mode = AttachMode::concat;
  bool link = false;
  double gamma = 0.0;
  ModelParams params;
  PromptPool pool;

  GradFixture(AttachMode m, bool link_task, double g) : mode(m), link(link_task), gamma(g) {
    const std::size_t out = link ? 4 : 3;
    const std::vector<std::size_t> widths{fused_width(mode, 3), 4, out};
    params = init_params(widths, true, 202);
    pool = PromptPool(random_matrix(3, 3, 303, 0.8));
  }

  struct Recorded {
    Var loss;
    ForwardPass pass;
  };

  Recorded record(Tape& tape) const {
    ModelOptions opts;
    opts.mode = mode;
    opts.alpha = 0.3;
    opts.dropout = 0.0;
    opts.training = false;
    auto pass = forward(tape, features, adjacency, &pool, params, opts, nullptr);
    Var loss;
    if (link) {
      loss = tape.link_bce(pass.output, heads, tails, negatives);
      if (gamma > 0.0) loss = tape.add(loss, tape.scale(tape.orthogonality(pass.prompts), gamma));
    } else {
      loss = classification_loss(tape, pass.output, labels, rows, pass.prompts, gamma);
    }
    return {loss, std::move(pass)};
  }

  double loss_value() const {
    Tape tape;
    return tape.value(record(tape).loss)(0, 0);
  }

  /// Central differences with step h over every weight, bias and prompt entry.
  GradCheck check(double h = 1e-5) {
    Tape tape;
    const auto rec = record(tape);
    tape.backward(rec.loss);
    GradCheck out;
    const auto probe = [&](DenseMatrix& target, const DenseMatrix& analytic) {
      for (std::size_t i = 0; i < target.size(); ++i) {
        const double saved = target.values()[i];
        target.values()[i] = saved + h;
        const double up = loss_value();
        target.values()[i] = saved - h;
        const double down = loss_value();
        target.values()[i] = saved;
        const double numeric = (up - down) / (2.0 * h);
        const double a = analytic.values()[i];
        const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
        out.max_rel_error = std::max(out.max_rel_error, std::abs(a - numeric) / denom);
        ++out.checked;
      }
    };
    for (std::size_t l = 0; l < params.weights.size(); ++l) probe(params.weights[l], tape.grad(rec.pass.weights[l]));
    for (std::size_t l = 0; l < params.biases.size(); ++l) probe(params.biases[l], tape.grad(rec.pass.biases[l]));
    DenseMatrix prompt_values = pool.values();
    const DenseMatrix prompt_grad = tape.grad(rec.pass.prompts);
    for (std::size_t i = 0; i < prompt_values.size(); ++i) {
      const double saved = prompt_values.values()[i];
      const auto eval = [&](double v) {
        prompt_values.values()[i] = v;
        pool = PromptPool(prompt_values);
        return loss_value();
      };
      const double numeric = (eval(saved + h) - eval(saved - h)) / (2.0 * h);
      eval(saved);
      const double a = prompt_grad.values()[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
      out.max_rel_error = std::max(out.max_rel_error, std::abs(a - numeric) / denom);
      ++out.checked;
    }
    return out;
  }
};

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("pgcn-" + tag + "-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

/// The reference dataset for the trend criteria: 4 blocks of 300 nodes.
inline SbmParams reference_sbm() {
  SbmParams p;
  p.blocks = 4;
  p.nodes_per_block = 300;
  p.p_in = 0.05;
  p.p_out = 0.002;
  p.feature_dim = 32;
  p.feature_shift = 1.0;
  p.seed = 7;
  return p;
}

}  // namespace pgcn::testing
