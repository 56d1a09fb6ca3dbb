#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "hdet/embeddings.hpp"
#include "hdet/layers.hpp"
#include "hdet/param_store.hpp"

namespace hdet {

// Canonical category order used for scores, labels and loss terms.
enum class Category : std::size_t { Harassment = 0, Indirect = 1, Sexual = 2, Physical = 3 };
inline constexpr std::size_t kNumCategories = 4;
inline constexpr std::array<const char*, kNumCategories> kCategoryNames = {
    "harassment", "indirect", "sexual", "physical"};

enum class Variant {
    LastStateRNN,
    AvgRNN,
    AttentionRNN,
    MultiAttentionRNN,
    ProjectedLastStateRNN,
    ProjectedAvgRNN,
    ProjectedAttentionRNN,
    MultiProjectedAttentionRNN,
};
inline constexpr std::array<Variant, 8> kAllVariants = {
    Variant::LastStateRNN,          Variant::AvgRNN,
    Variant::AttentionRNN,          Variant::MultiAttentionRNN,
    Variant::ProjectedLastStateRNN, Variant::ProjectedAvgRNN,
    Variant::ProjectedAttentionRNN, Variant::MultiProjectedAttentionRNN,
};

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);  // ConfigError on unknown names
bool variant_is_projected(Variant v);
bool variant_uses_attention(Variant v);
bool variant_is_multi_attention(Variant v);
bool variant_is_avg(Variant v);

struct ModelConfig {
    Variant variant = Variant::MultiProjectedAttentionRNN;
    std::size_t embed_dim = 200;   // d
    std::size_t gru_size = 128;    // m
    std::size_t proj_width = 128;  // p
    std::size_t head_width = 128;
    std::size_t attn_hidden = 128;
    std::size_t attn_layers = 1;
    std::size_t head_layers = 1;
    double dropout_rate = 0.2;
    std::size_t max_len = 70;
    std::uint64_t seed = 42;

    void validate() const;  // ConfigError on bad values
};

struct ScoreVector {
    double harassment = 0.0;
    double indirect = 0.0;
    double sexual = 0.0;
    double physical = 0.0;

    double operator[](Category c) const;
    double& operator[](Category c);
};

struct LabelVector {
    int harassment = 0;
    int indirect = 0;
    int sexual = 0;
    int physical = 0;

    int operator[](Category c) const;
    int& operator[](Category c);
    bool operator==(const LabelVector&) const = default;
};

// Threshold gate: harassment score below the threshold zeroes every label;
// otherwise harassment = 1 and the max-scoring type wins. Exact ties resolve
// by train-set prevalence: sexual > indirect > physical.
LabelVector decide(const ScoreVector& scores, double threshold);

// One assembled variant. Inference (`score`) is const and thread-safe; the
// training loop drives `forward`/`backward` with caches and mutates parameters
// through the store.
class Model {
  public:
    Model(const ModelConfig& config, const EmbeddingMatrix& embeddings);

    const ModelConfig& config() const { return config_; }
    ParamStore& params() { return params_; }
    const ParamStore& params() const { return params_; }
    std::size_t parameter_count() const { return params_.parameter_count(); }
    std::size_t vocab_size() const { return embedding_->value.rows(); }

    void set_embedding_trainable(bool trainable) { embedding_->trainable = trainable; }

    struct Caches {
        DropoutCache dropout;
        ProjectionCache projection;
        GruCache gru;
        std::vector<AttentionCache> attention;   // 1 shared or 4
        std::array<HeadCache, kNumCategories> heads;
        std::vector<std::size_t> tokens;
        std::size_t seq_len = 0;
    };

    // Four per-category probabilities for one token sequence. `dropout_rng`
    // is only consulted when training is true and the dropout rate is > 0.
    std::array<double, kNumCategories> forward(std::span<const std::size_t> tokens, bool training,
                                               Rng* dropout_rng, Caches* caches) const;

    // Accumulates parameter gradients (including embedding rows) given
    // dL/d(probability) per category.
    void backward(const std::array<double, kNumCategories>& d_probs, const Caches& caches);

    ScoreVector score(std::span<const std::size_t> tokens) const;

    void save(const std::filesystem::path& path) const;
    static Model load(const std::filesystem::path& path);

  private:
    ModelConfig config_;
    ParamStore params_;
    Param* embedding_ = nullptr;
    ProjectionParams projection_;
    GruParams gru_;
    std::vector<AttentionParams> attentions_;
    std::array<HeadParams, kNumCategories> heads_;

    void wire(const Tensor& embedding_matrix, Rng& rng);
};

}  // namespace hdet
