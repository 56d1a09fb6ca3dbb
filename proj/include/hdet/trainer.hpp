#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "hdet/adam.hpp"
#include "hdet/metrics.hpp"
#include "hdet/model.hpp"

namespace hdet {

struct TrainConfig {
    double lr = 0.001;
    std::size_t batch_size = 32;
    std::size_t max_epochs = 20;
    std::size_t patience = 10;
    double threshold = 0.33;
    std::uint64_t seed = 42;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    bool freeze_embeddings = false;

    void validate() const;
};

// Tracks the best value of a higher-is-better metric with strict-improvement
// patience counting.
class EarlyStopping {
  public:
    explicit EarlyStopping(std::size_t patience) : patience_(patience) {}

    // Call once per epoch; returns true when this epoch strictly improved.
    bool observe(double metric) {
        ++epochs_seen_;
        if (metric > best_) {
            best_ = metric;
            best_epoch_ = epochs_seen_;
            since_best_ = 0;
            return true;
        }
        ++since_best_;
        return false;
    }

    bool should_stop() const { return since_best_ >= patience_; }
    int best_epoch() const { return best_epoch_; }
    double best() const { return best_; }

  private:
    std::size_t patience_;
    double best_ = -std::numeric_limits<double>::infinity();
    int best_epoch_ = 0;
    int epochs_seen_ = 0;
    std::size_t since_best_ = 0;
};

struct EpochRecord {
    int epoch = 0;            // 1-based
    double train_loss = 0.0;  // mean per-example multitask loss over the epoch
    double val_auc_avg = 0.0;
    double val_f1_macro = 0.0;
};

struct History {
    std::vector<EpochRecord> epochs;
    int best_epoch = 0;
    double best_val_auc_avg = 0.0;
    bool stopped_early = false;
};

// Forward-only multitask loss over a batch; leaves gradients untouched. The
// deterministic closure grad_check needs.
double batch_loss(const Model& model, std::span<const EncodedExample* const> batch, bool training,
                  Rng* dropout_rng);
double batch_loss(const Model& model, std::span<const EncodedExample> batch, bool training,
                  Rng* dropout_rng);

// Forward + backward: accumulates parameter gradients for the mean-over-batch
// loss and returns it.
double batch_loss_backward(Model& model, std::span<const EncodedExample* const> batch,
                           Rng* dropout_rng);
double batch_loss_backward(Model& model, std::span<const EncodedExample> batch, Rng* dropout_rng);

// Full training loop: seeded shuffling, batches of config.batch_size (last one
// smaller), one Adam step per batch, early stopping on validation average AUC.
// The model is left holding the best epoch's parameters.
History train(Model& model, const std::vector<EncodedExample>& train_set,
              const std::vector<EncodedExample>& val_set, const TrainConfig& config);

}  // namespace hdet
