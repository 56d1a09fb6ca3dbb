#include "hdet/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hdet/errors.hpp"

namespace hdet {

namespace {
double clamp_prob(double p) { return std::min(1.0 - kBceEps, std::max(kBceEps, p)); }
}  // namespace

double bce(std::span<const double> labels, std::span<const double> probs) {
    if (labels.size() != probs.size()) {
        throw ShapeError("bce: " + std::to_string(labels.size()) + " labels vs " +
                         std::to_string(probs.size()) + " probabilities");
    }
    if (labels.empty()) throw ContractError("bce: empty batch");
    double acc = 0.0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const double p = clamp_prob(probs[i]);
        acc += labels[i] * std::log(p) + (1.0 - labels[i]) * std::log(1.0 - p);
    }
    return -acc / static_cast<double>(labels.size());
}

double bce_grad(double label, double prob, std::size_t n) {
    if (prob <= kBceEps || prob >= 1.0 - kBceEps) return 0.0;  // clamped region is flat
    return (-label / prob + (1.0 - label) / (1.0 - prob)) / static_cast<double>(n);
}

double multitask_loss(double b_har, double b_sex, double b_ind, double b_phys) {
    return 0.5 * b_har + 0.5 * (b_sex / 5.0 + 2.0 * b_ind / 5.0 + 2.0 * b_phys / 5.0);
}

std::array<double, kNumCategories> category_loss_weights() {
    std::array<double, kNumCategories> w{};
    w[static_cast<std::size_t>(Category::Harassment)] = 0.5;
    w[static_cast<std::size_t>(Category::Sexual)] = 0.5 / 5.0;
    w[static_cast<std::size_t>(Category::Indirect)] = 0.5 * 2.0 / 5.0;
    w[static_cast<std::size_t>(Category::Physical)] = 0.5 * 2.0 / 5.0;
    return w;
}

AucResult auc(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size()) {
        throw ShapeError("auc: " + std::to_string(scores.size()) + " scores vs " +
                         std::to_string(labels.size()) + " labels");
    }
    if (scores.empty()) throw ContractError("auc: empty input");

    const std::size_t n = scores.size();
    std::size_t positives = 0;
    for (int y : labels) positives += (y != 0);
    const std::size_t negatives = n - positives;
    if (positives == 0 || negatives == 0) {
        return {0.5, true};
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Sum of average ranks of the positives; ties share the mean rank of their group.
    double rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>((i + 1) + (j + 1));
        for (std::size_t g = i; g <= j; ++g) {
            if (labels[order[g]] != 0) rank_sum += avg_rank;
        }
        i = j + 1;
    }
    const double p = static_cast<double>(positives);
    const double value = (rank_sum - p * (p + 1.0) / 2.0) /
                         (p * static_cast<double>(negatives));
    return {value, false};
}

double f1(std::span<const int> predicted, std::span<const int> truth) {
    if (predicted.size() != truth.size()) {
        throw ShapeError("f1: " + std::to_string(predicted.size()) + " predictions vs " +
                         std::to_string(truth.size()) + " labels");
    }
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const bool p = predicted[i] != 0;
        const bool t = truth[i] != 0;
        if (p && t) ++tp;
        else if (p && !t) ++fp;
        else if (!p && t) ++fn;
    }
    const double denom = static_cast<double>(2 * tp + fp + fn);
    if (denom == 0.0) return 0.0;
    return 2.0 * static_cast<double>(tp) / denom;
}

MetricsReport evaluate(const Model& model, std::span<const EncodedExample> dataset,
                       double threshold) {
    if (dataset.empty()) throw ContractError("evaluate: empty dataset");
    const std::size_t n = dataset.size();

    std::array<std::vector<double>, kNumCategories> raw_scores;
    std::array<std::vector<int>, kNumCategories> decided, truth;
    for (auto& v : raw_scores) v.reserve(n);
    for (auto& v : decided) v.reserve(n);
    for (auto& v : truth) v.reserve(n);

    for (const EncodedExample& ex : dataset) {
        const ScoreVector scores = model.score(ex.tokens);
        const LabelVector labels = decide(scores, threshold);
        for (std::size_t c = 0; c < kNumCategories; ++c) {
            const Category cat = static_cast<Category>(c);
            raw_scores[c].push_back(scores[cat]);
            decided[c].push_back(labels[cat]);
            truth[c].push_back(ex.labels[c]);
        }
    }

    MetricsReport report;
    double f1_sum = 0.0, auc_sum = 0.0;
    for (std::size_t c = 0; c < kNumCategories; ++c) {
        report.f1[c] = f1(decided[c], truth[c]);
        const AucResult a = auc(raw_scores[c], truth[c]);
        report.auc[c] = a.value;
        report.auc_degenerate[c] = a.degenerate;
        f1_sum += report.f1[c];
        auc_sum += report.auc[c];
    }
    report.f1_macro = f1_sum / static_cast<double>(kNumCategories);
    report.auc_avg = auc_sum / static_cast<double>(kNumCategories);
    return report;
}

}  // namespace hdet
