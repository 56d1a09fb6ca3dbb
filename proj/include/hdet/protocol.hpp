#pragma once

#include <functional>
#include <iosfwd>
#include <span>

#include "hdet/trainer.hpp"

namespace hdet {

// Per-(variant, seed) outcome of the comparison protocol.
struct ProtocolRun {
    Variant variant{};
    std::uint64_t seed = 0;
    MetricsReport report;
};

// Per-variant aggregation over the run seeds: metric means plus standard
// deviations (population form, defined for a single run).
struct VariantSummary {
    Variant variant{};
    std::array<double, kNumCategories> f1_mean{};
    std::array<double, kNumCategories> f1_std{};
    double f1_macro_mean = 0.0;
    double f1_macro_std = 0.0;
    std::array<double, kNumCategories> auc_mean{};
    double auc_avg_mean = 0.0;
    std::vector<ProtocolRun> runs;
};

// Builds the per-run embedding matrix; run seeds feed the OOV row init so each
// run is fully reproducible from its seed alone.
using EmbeddingFactory = std::function<EmbeddingMatrix(std::uint64_t run_seed)>;

// Runs every variant n_runs times (run seeds 1..n_runs), training on train_set
// with early stopping on val_set and reporting metrics on eval_set. Runs are
// independent and may execute on up to `jobs` threads; results are aggregated
// in fixed (variant, seed) order so the output does not depend on scheduling.
// A failed run aborts the whole protocol with the failing (variant, seed).
std::vector<VariantSummary> run_protocol(std::span<const Variant> variants,
                                         const ModelConfig& base_model,
                                         const TrainConfig& base_train,
                                         const EmbeddingFactory& embeddings,
                                         const std::vector<EncodedExample>& train_set,
                                         const std::vector<EncodedExample>& val_set,
                                         const std::vector<EncodedExample>& eval_set,
                                         std::size_t n_runs, std::size_t jobs = 1);

// Comparison table in the protocol's column layout:
//   model,sexual_f1,indirect_f1,physical_f1,harassment_f1,f1_macro,<std columns>
// Rows follow the input order unless sort_by_f1_macro orders them descending.
void write_bench_csv(std::ostream& out, std::span<const VariantSummary> summaries,
                     bool sort_by_f1_macro);

}  // namespace hdet
