#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "hdet/model.hpp"

namespace hdet {

// Predicted-probability clamp used by the loss.
inline constexpr double kBceEps = 1e-7;

// Mean binary cross-entropy over a batch: -(1/n) sum [y log p + (1-y) log(1-p)]
// with p clamped to [kBceEps, 1-kBceEps].
double bce(std::span<const double> labels, std::span<const double> probs);

// d(bce)/dp for one sample in a batch of n; zero in the clamped regions so the
// derivative matches the clamped forward exactly.
double bce_grad(double label, double prob, std::size_t n);

// L = 1/2 b_har + 1/2 (1/5 b_sex + 2/5 b_ind + 2/5 b_phys)
double multitask_loss(double b_har, double b_sex, double b_ind, double b_phys);

// Per-category loss weights in canonical Category order, i.e. the factor
// multiplying each category's BCE inside multitask_loss.
std::array<double, kNumCategories> category_loss_weights();

struct AucResult {
    double value = 0.5;
    bool degenerate = false;  // one class absent; value pinned to 0.5
};

// ROC AUC as normalized Mann-Whitney U: (concordant + 0.5 * tied) / (P * N),
// computed via average ranks in O(n log n).
AucResult auc(std::span<const double> scores, std::span<const int> labels);

// 2TP / (2TP + FP + FN); 0 when the denominator is 0 (the algebraic form of
// the precision/recall harmonic mean, with the usual zero conventions).
double f1(std::span<const int> predicted, std::span<const int> truth);

struct MetricsReport {
    std::array<double, kNumCategories> f1{};             // canonical category order
    double f1_macro = 0.0;
    std::array<double, kNumCategories> auc{};
    std::array<bool, kNumCategories> auc_degenerate{};
    double auc_avg = 0.5;
    std::uint64_t seed = 0;
    int best_epoch = 0;
};

// One encoded example: token indices (k >= 1) plus the four binary labels.
struct EncodedExample {
    std::vector<std::size_t> tokens;
    std::array<int, kNumCategories> labels{};
};

// Scores every example, applies the decision rule at `threshold`, computes
// per-category F1 on the decided labels and per-category AUC on the raw scores.
MetricsReport evaluate(const Model& model, std::span<const EncodedExample> dataset,
                       double threshold);

}  // namespace hdet
