#include "hdet/trainer.hpp"

#include <cmath>

#include "hdet/errors.hpp"

namespace hdet {

void TrainConfig::validate() const {
    if (!(lr > 0.0)) throw ConfigError("train config: lr must be positive");
    if (batch_size < 1) throw ConfigError("train config: batch_size must be >= 1");
    if (max_epochs < 1) throw ConfigError("train config: max_epochs must be >= 1");
    if (patience > max_epochs) throw ConfigError("train config: patience must be <= max_epochs");
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ConfigError("train config: threshold must be in (0, 1)");
    }
}

namespace {

std::vector<const EncodedExample*> to_pointers(std::span<const EncodedExample> batch) {
    std::vector<const EncodedExample*> ptrs;
    ptrs.reserve(batch.size());
    for (const auto& ex : batch) ptrs.push_back(&ex);
    return ptrs;
}

}  // namespace

double batch_loss(const Model& model, std::span<const EncodedExample* const> batch, bool training,
                  Rng* dropout_rng) {
    if (batch.empty()) throw ContractError("batch_loss: empty batch");
    const std::size_t n = batch.size();
    std::array<std::vector<double>, kNumCategories> labels, probs;
    for (auto& v : labels) v.reserve(n);
    for (auto& v : probs) v.reserve(n);

    Model::Caches caches;
    for (const EncodedExample* ex : batch) {
        const auto p = model.forward(ex->tokens, training, dropout_rng, &caches);
        for (std::size_t c = 0; c < kNumCategories; ++c) {
            labels[c].push_back(static_cast<double>(ex->labels[c]));
            probs[c].push_back(p[c]);
        }
    }
    std::array<double, kNumCategories> b{};
    for (std::size_t c = 0; c < kNumCategories; ++c) b[c] = bce(labels[c], probs[c]);
    return multitask_loss(b[static_cast<std::size_t>(Category::Harassment)],
                          b[static_cast<std::size_t>(Category::Sexual)],
                          b[static_cast<std::size_t>(Category::Indirect)],
                          b[static_cast<std::size_t>(Category::Physical)]);
}

double batch_loss(const Model& model, std::span<const EncodedExample> batch, bool training,
                  Rng* dropout_rng) {
    const auto ptrs = to_pointers(batch);
    return batch_loss(model, ptrs, training, dropout_rng);
}

double batch_loss_backward(Model& model, std::span<const EncodedExample* const> batch,
                           Rng* dropout_rng) {
    if (batch.empty()) throw ContractError("batch_loss_backward: empty batch");
    const std::size_t n = batch.size();
    const auto weights = category_loss_weights();

    std::array<double, kNumCategories> bce_sums{};
    Model::Caches caches;
    for (const EncodedExample* ex : batch) {
        const auto p = model.forward(ex->tokens, /*training=*/true, dropout_rng, &caches);
        std::array<double, kNumCategories> d_probs{};
        for (std::size_t c = 0; c < kNumCategories; ++c) {
            const double y = static_cast<double>(ex->labels[c]);
            const double pc = std::min(1.0 - kBceEps, std::max(kBceEps, p[c]));
            bce_sums[c] += -(y * std::log(pc) + (1.0 - y) * std::log(1.0 - pc));
            d_probs[c] = weights[c] * bce_grad(y, p[c], n);
        }
        model.backward(d_probs, caches);
    }
    std::array<double, kNumCategories> b{};
    for (std::size_t c = 0; c < kNumCategories; ++c) b[c] = bce_sums[c] / static_cast<double>(n);
    return multitask_loss(b[static_cast<std::size_t>(Category::Harassment)],
                          b[static_cast<std::size_t>(Category::Sexual)],
                          b[static_cast<std::size_t>(Category::Indirect)],
                          b[static_cast<std::size_t>(Category::Physical)]);
}

double batch_loss_backward(Model& model, std::span<const EncodedExample> batch, Rng* dropout_rng) {
    const auto ptrs = to_pointers(batch);
    return batch_loss_backward(model, ptrs, dropout_rng);
}

History train(Model& model, const std::vector<EncodedExample>& train_set,
              const std::vector<EncodedExample>& val_set, const TrainConfig& config) {
    config.validate();
    if (train_set.empty() || val_set.empty()) {
        throw ContractError("train: train and validation sets must be non-empty");
    }

    model.set_embedding_trainable(!config.freeze_embeddings);
    Adam adam({config.lr, config.adam_beta1, config.adam_beta2, config.adam_eps});
    Rng shuffle_rng(derive_seed(config.seed, "shuffle"));
    Rng dropout_rng(derive_seed(config.seed, "dropout"));
    EarlyStopping stopper(config.patience);

    std::vector<const EncodedExample*> order = to_pointers(train_set);
    const std::size_t n = order.size();

    History history;
    std::vector<Tensor> best_params = model.params().snapshot_values();

    for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
        shuffle_rng.shuffle(order);

        double loss_sum = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < n; start += config.batch_size, ++batch_index) {
            const std::size_t len = std::min(config.batch_size, n - start);
            std::span<const EncodedExample* const> batch(order.data() + start, len);
            model.params().zero_grads();
            const double loss = batch_loss_backward(model, batch, &dropout_rng);
            if (!std::isfinite(loss)) {
                throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                   ", batch " + std::to_string(batch_index));
            }
            adam.step(model.params());
            loss_sum += loss * static_cast<double>(len);
        }

        const MetricsReport val = evaluate(model, val_set, config.threshold);
        EpochRecord rec;
        rec.epoch = static_cast<int>(epoch);
        rec.train_loss = loss_sum / static_cast<double>(n);
        rec.val_auc_avg = val.auc_avg;
        rec.val_f1_macro = val.f1_macro;
        history.epochs.push_back(rec);

        if (stopper.observe(val.auc_avg)) {
            best_params = model.params().snapshot_values();
        }
        if (stopper.should_stop()) {
            history.stopped_early = true;
            break;
        }
    }

    model.params().restore_values(best_params);
    history.best_epoch = stopper.best_epoch();
    history.best_val_auc_avg = stopper.best();
    return history;
}

}  // namespace hdet
