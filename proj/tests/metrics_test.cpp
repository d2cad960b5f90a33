#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <vector>

#include "homecare/errors.hpp"
#include "homecare/metrics.hpp"
#include "homecare/rng.hpp"

using homecare::Rng;
using homecare::eval::auc;

namespace {

// O(n^2) reference: fraction of positive-negative pairs ranked correctly,
// ties counted 1/2.
double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    double won = 0.0;
    long pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != +1) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != -1) continue;
            ++pairs;
            if (scores[i] > scores[j]) won += 1.0;
            else if (scores[i] == scores[j]) won += 0.5;
        }
    }
    return won / static_cast<double>(pairs);
}

void random_case(Rng& rng, bool quantize, std::vector<double>& scores, std::vector<int>& labels) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.below(199));
    scores.resize(n);
    labels.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        scores[i] = quantize ? static_cast<double>(rng.below(5)) / 4.0 : rng.uniform01();
        labels[i] = rng.bernoulli(0.4) ? +1 : -1;
    }
    // Force both classes.
    labels[0] = +1;
    labels[n - 1] = -1;
}

}  // namespace

TEST_CASE("perfect ranking scores 1") {
    std::vector<double> scores = {0.9, 0.8, 0.1};
    std::vector<int> labels = {+1, +1, -1};
    CHECK_EQ(auc(scores, labels), 1.0);
}

TEST_CASE("all scores equal gives 0.5") {
    std::vector<double> scores = {0.3, 0.3, 0.3, 0.3};
    std::vector<int> labels = {+1, -1, +1, -1};
    CHECK_EQ(auc(scores, labels), 0.5);
}

TEST_CASE("two of four pairs correct gives 0.5") {
    std::vector<double> scores = {0.9, 0.4, 0.6, 0.2};
    std::vector<int> labels = {+1, -1, -1, +1};
    CHECK_EQ(auc(scores, labels), 0.5);
}

TEST_CASE("reversed ranking scores 0") {
    std::vector<double> scores = {0.1, 0.9};
    std::vector<int> labels = {+1, -1};
    CHECK_EQ(auc(scores, labels), 0.0);
}

TEST_CASE("rank-based auc equals brute-force pair counting") {
    Rng rng(20240501);
    std::vector<double> scores;
    std::vector<int> labels;
    for (int trial = 0; trial < 200; ++trial) {
        random_case(rng, trial % 2 == 0, scores, labels);
        const double fast = auc(scores, labels);
        const double slow = pairwise_auc(scores, labels);
        REQUIRE(std::abs(fast - slow) <= 1e-12);
    }
}

TEST_CASE("auc is invariant under strictly monotone score transforms") {
    Rng rng(77);
    std::vector<double> scores;
    std::vector<int> labels;
    for (int trial = 0; trial < 20; ++trial) {
        random_case(rng, trial % 2 == 0, scores, labels);
        const double base = auc(scores, labels);
        // Scaling by a power of two is exact, so no ties appear or vanish.
        std::vector<double> scaled(scores);
        for (double& s : scaled) s *= 4.0;
        CHECK_EQ(auc(scaled, labels), base);
    }
}

TEST_CASE("duplicating every negative leaves auc unchanged") {
    Rng rng(5150);
    std::vector<double> scores;
    std::vector<int> labels;
    for (int trial = 0; trial < 20; ++trial) {
        random_case(rng, trial % 2 == 0, scores, labels);
        std::vector<double> dup_scores(scores);
        std::vector<int> dup_labels(labels);
        for (std::size_t i = 0; i < scores.size(); ++i) {
            if (labels[i] == -1) {
                dup_scores.push_back(scores[i]);
                dup_labels.push_back(-1);
            }
        }
        CHECK(std::abs(auc(dup_scores, dup_labels) - auc(scores, labels)) <= 1e-12);
    }
}

TEST_CASE("single-class input is an error") {
    std::vector<double> scores = {0.1, 0.9};
    std::vector<int> pos = {+1, +1};
    std::vector<int> neg = {-1, -1};
    CHECK_THROWS_AS(auc(scores, pos), homecare::ValidationError);
    CHECK_THROWS_AS(auc(scores, neg), homecare::ValidationError);
}

TEST_CASE("mismatched lengths are an error") {
    std::vector<double> scores = {0.1, 0.9, 0.5};
    std::vector<int> labels = {+1, -1};
    CHECK_THROWS_AS(auc(scores, labels), homecare::ValidationError);
}
