#include "pgcn/metrics.hpp"

#include <string>

#include "pgcn/error.hpp"

namespace pgcn {

std::vector<std::uint32_t> predict_classes(const DenseMatrix& logits) {
  std::vector<std::uint32_t> out(logits.rows(), 0);
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    const auto row = logits.row(r);
    std::size_t best = 0;
    for (std::size_t c = 1; c < row.size(); ++c) {
      if (row[c] > row[best]) best = c;
    }
    out[r] = static_cast<std::uint32_t>(best);
  }
  return out;
}

ClassificationScores evaluate_classification(std::span<const std::uint32_t> predictions,
                                             std::span<const std::uint32_t> labels,
                                             std::span<const std::uint8_t> mask, std::size_t num_classes) {
  if (predictions.size() != labels.size() || mask.size() != labels.size()) {
    throw ShapeError("evaluate_classification: length mismatch");
  }
  std::vector<std::size_t> tp(num_classes, 0), fp(num_classes, 0), fn(num_classes, 0);
  std::size_t total = 0, correct = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!mask[i]) continue;
    const auto y = labels[i];
    const auto p = predictions[i];
    if (y >= num_classes || p >= num_classes) throw BoundsError("evaluate_classification: class out of range");
    ++total;
    if (p == y) {
      ++correct;
      ++tp[y];
    } else {
      ++fp[p];
      ++fn[y];
    }
  }
  if (total == 0) throw InvalidArgument("evaluate_classification: empty mask");
  ClassificationScores s;
  s.accuracy = static_cast<double>(correct) / static_cast<double>(total);
  double f1_sum = 0.0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    const double denom = static_cast<double>(2 * tp[c] + fp[c] + fn[c]);
    f1_sum += denom > 0.0 ? 2.0 * static_cast<double>(tp[c]) / denom : 0.0;
  }
  s.macro_f1 = num_classes ? f1_sum / static_cast<double>(num_classes) : 0.0;
  return s;
}

ClassificationScores evaluate_classification(const DenseMatrix& logits, std::span<const std::uint32_t> labels,
                                             std::span<const std::uint8_t> mask, std::size_t num_classes) {
  if (logits.cols() != num_classes) throw ShapeError("evaluate_classification: logits width != class count");
  const auto pred = predict_classes(logits);
  return evaluate_classification(pred, labels, mask, num_classes);
}

LinkScores evaluate_link(std::span<const double> positives, const DenseMatrix& negatives, std::size_t k) {
  if (positives.empty()) throw InvalidArgument("evaluate_link: no positives");
  if (negatives.rows() != positives.size()) throw ShapeError("evaluate_link: one negative row per positive");
  LinkScores s;
  for (std::size_t i = 0; i < positives.size(); ++i) {
    std::size_t rank = 1;
    for (double neg : negatives.row(i)) {
      if (neg >= positives[i]) ++rank;
    }
    s.mrr += 1.0 / static_cast<double>(rank);
    if (rank <= k) s.hits_at_k += 1.0;
  }
  s.mrr /= static_cast<double>(positives.size());
  s.hits_at_k /= static_cast<double>(positives.size());
  return s;
}

}  // namespace pgcn
