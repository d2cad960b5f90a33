#include "homecare/metrics.hpp"

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

#include "homecare/errors.hpp"

namespace homecare::eval {

double auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) {
        throw ValidationError("AUC: scores and labels differ in length");
    }
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
    for (int label : labels) {
        if (label == +1) {
            ++n_pos;
        } else if (label == -1) {
            ++n_neg;
        } else {
            throw ValidationError("AUC: labels must be -1 or +1");
        }
    }
    if (n_pos == 0 || n_neg == 0) {
        throw ValidationError("AUC undefined: test set contains a single class");
    }

    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Sum of average ranks of the positives. Average ranks over a tie group
    // are half-integers, so the sum is exact in doubles at these sizes.
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
        for (std::size_t k = i; k < j; ++k) {
            if (labels[order[k]] == +1) rank_sum_pos += avg_rank;
        }
        i = j;
    }

    const double np = static_cast<double>(n_pos);
    const double nn = static_cast<double>(n_neg);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

}  // namespace homecare::eval
