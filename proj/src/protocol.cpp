#include "hdet/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "hdet/errors.hpp"

namespace hdet {

namespace {

MetricsReport run_one(Variant variant, std::uint64_t run_seed, const ModelConfig& base_model,
                      const TrainConfig& base_train, const EmbeddingFactory& embeddings,
                      const std::vector<EncodedExample>& train_set,
                      const std::vector<EncodedExample>& val_set,
                      const std::vector<EncodedExample>& eval_set) {
    ModelConfig mc = base_model;
    mc.variant = variant;
    mc.seed = run_seed;
    TrainConfig tc = base_train;
    tc.seed = run_seed;

    Model model(mc, embeddings(run_seed));
    const History history = train(model, train_set, val_set, tc);
    MetricsReport report = evaluate(model, eval_set, tc.threshold);
    report.seed = run_seed;
    report.best_epoch = history.best_epoch;
    return report;
}

double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double std_of(const std::vector<double>& xs, double mean) {
    double s = 0.0;
    for (double x : xs) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(xs.size()));
}

}  // namespace

std::vector<VariantSummary> run_protocol(std::span<const Variant> variants,
                                         const ModelConfig& base_model,
                                         const TrainConfig& base_train,
                                         const EmbeddingFactory& embeddings,
                                         const std::vector<EncodedExample>& train_set,
                                         const std::vector<EncodedExample>& val_set,
                                         const std::vector<EncodedExample>& eval_set,
                                         std::size_t n_runs, std::size_t jobs) {
    if (n_runs < 1) throw ConfigError("protocol: n_runs must be >= 1");
    if (jobs < 1) jobs = 1;

    struct Task {
        Variant variant;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (Variant v : variants) {
        for (std::uint64_t s = 1; s <= n_runs; ++s) tasks.push_back({v, s});
    }

    std::vector<MetricsReport> reports(tasks.size());
    std::vector<std::string> failures(tasks.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                reports[i] = run_one(tasks[i].variant, tasks[i].seed, base_model, base_train,
                                     embeddings, train_set, val_set, eval_set);
            } catch (const std::exception& e) {
                failures[i] = e.what();
            }
        }
    };

    const std::size_t n_threads = std::min(jobs, tasks.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (!failures[i].empty()) {
            throw Error("protocol: run failed (variant " + std::string(variant_name(tasks[i].variant)) +
                        ", seed " + std::to_string(tasks[i].seed) + "): " + failures[i]);
        }
    }

    std::vector<VariantSummary> summaries;
    summaries.reserve(variants.size());
    std::size_t cursor = 0;
    for (Variant v : variants) {
        VariantSummary s;
        s.variant = v;
        std::array<std::vector<double>, kNumCategories> f1s, aucs;
        std::vector<double> macros, auc_avgs;
        for (std::uint64_t r = 1; r <= n_runs; ++r, ++cursor) {
            const MetricsReport& rep = reports[cursor];
            s.runs.push_back({v, r, rep});
            for (std::size_t c = 0; c < kNumCategories; ++c) {
                f1s[c].push_back(rep.f1[c]);
                aucs[c].push_back(rep.auc[c]);
            }
            macros.push_back(rep.f1_macro);
            auc_avgs.push_back(rep.auc_avg);
        }
        for (std::size_t c = 0; c < kNumCategories; ++c) {
            s.f1_mean[c] = mean_of(f1s[c]);
            s.f1_std[c] = std_of(f1s[c], s.f1_mean[c]);
            s.auc_mean[c] = mean_of(aucs[c]);
        }
        s.f1_macro_mean = mean_of(macros);
        s.f1_macro_std = std_of(macros, s.f1_macro_mean);
        s.auc_avg_mean = mean_of(auc_avgs);
        summaries.push_back(std::move(s));
    }
    return summaries;
}

void write_bench_csv(std::ostream& out, std::span<const VariantSummary> summaries,
                     bool sort_by_f1_macro) {
    std::vector<const VariantSummary*> rows;
    rows.reserve(summaries.size());
    for (const auto& s : summaries) rows.push_back(&s);
    if (sort_by_f1_macro) {
        std::stable_sort(rows.begin(), rows.end(), [](const VariantSummary* a, const VariantSummary* b) {
            return a->f1_macro_mean > b->f1_macro_mean;
        });
    }

    out << "model,sexual_f1,indirect_f1,physical_f1,harassment_f1,f1_macro,"
           "sexual_f1_std,indirect_f1_std,physical_f1_std,harassment_f1_std,f1_macro_std\n";
    auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6f", v);
        return std::string(buf);
    };
    const auto sex = static_cast<std::size_t>(Category::Sexual);
    const auto ind = static_cast<std::size_t>(Category::Indirect);
    const auto phy = static_cast<std::size_t>(Category::Physical);
    const auto har = static_cast<std::size_t>(Category::Harassment);
    for (const VariantSummary* s : rows) {
        out << variant_name(s->variant) << ',' << fmt(s->f1_mean[sex]) << ',' << fmt(s->f1_mean[ind])
            << ',' << fmt(s->f1_mean[phy]) << ',' << fmt(s->f1_mean[har]) << ','
            << fmt(s->f1_macro_mean) << ',' << fmt(s->f1_std[sex]) << ',' << fmt(s->f1_std[ind])
            << ',' << fmt(s->f1_std[phy]) << ',' << fmt(s->f1_std[har]) << ','
            << fmt(s->f1_macro_std) << '\n';
    }
}

}  // namespace hdet
