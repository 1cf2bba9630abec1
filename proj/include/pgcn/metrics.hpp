#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pgcn/dense.hpp"

namespace pgcn {

struct ClassificationScores {
  double accuracy = 0.0;
  double macro_f1 = 0.0;
};

struct LinkScores {
  double mrr = 0.0;
  double hits_at_k = 0.0;
};

/// Argmax per row, lowest index on ties.
std::vector<std::uint32_t> predict_classes(const DenseMatrix& logits);

/// Accuracy and macro-F1 over mask; classes with no support and no
/// predictions in the mask count as F1 = 0. Throws InvalidArgument on an empty mask.
ClassificationScores evaluate_classification(std::span<const std::uint32_t> predictions,
                                             std::span<const std::uint32_t> labels,
                                             std::span<const std::uint8_t> mask, std::size_t num_classes);
ClassificationScores evaluate_classification(const DenseMatrix& logits, std::span<const std::uint32_t> labels,
                                             std::span<const std::uint8_t> mask, std::size_t num_classes);

/// Row i of negatives holds the scores competing with positives[i].
/// rank = 1 + #{neg >= pos}.
LinkScores evaluate_link(std::span<const double> positives, const DenseMatrix& negatives, std::size_t k);

}  // namespace pgcn
