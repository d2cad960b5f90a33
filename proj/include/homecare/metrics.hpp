#pragma once

#include <span>

namespace homecare::eval {

/// Rank-based (Mann-Whitney) AUC with average-rank tie handling:
/// P(score of a positive > score of a negative) + 0.5 * P(tie).
/// Labels are -1/+1. Throws ValidationError when only one class is present
/// ("AUC undefined") or lengths differ.
double auc(std::span<const double> scores, std::span<const int> labels);

}  // namespace homecare::eval
