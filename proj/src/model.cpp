#include "hdet/model.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "hdet/errors.hpp"

namespace hdet {

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::LastStateRNN: return "LastStateRNN";
        case Variant::AvgRNN: return "AvgRNN";
        case Variant::AttentionRNN: return "AttentionRNN";
        case Variant::MultiAttentionRNN: return "MultiAttentionRNN";
        case Variant::ProjectedLastStateRNN: return "ProjectedLastStateRNN";
        case Variant::ProjectedAvgRNN: return "ProjectedAvgRNN";
        case Variant::ProjectedAttentionRNN: return "ProjectedAttentionRNN";
        case Variant::MultiProjectedAttentionRNN: return "MultiProjectedAttentionRNN";
    }
    throw ConfigError("unknown variant enum value");
}

Variant variant_from_name(const std::string& name) {
    for (Variant v : kAllVariants) {
        if (name == variant_name(v)) return v;
    }
    std::string known;
    for (Variant v : kAllVariants) {
        if (!known.empty()) known += ", ";
        known += variant_name(v);
    }
    throw ConfigError("unknown variant '" + name + "' (expected one of: " + known + ")");
}

bool variant_is_projected(Variant v) {
    switch (v) {
        case Variant::ProjectedLastStateRNN:
        case Variant::ProjectedAvgRNN:
        case Variant::ProjectedAttentionRNN:
        case Variant::MultiProjectedAttentionRNN:
            return true;
        default:
            return false;
    }
}

bool variant_uses_attention(Variant v) {
    switch (v) {
        case Variant::AttentionRNN:
        case Variant::MultiAttentionRNN:
        case Variant::ProjectedAttentionRNN:
        case Variant::MultiProjectedAttentionRNN:
            return true;
        default:
            return false;
    }
}

bool variant_is_multi_attention(Variant v) {
    return v == Variant::MultiAttentionRNN || v == Variant::MultiProjectedAttentionRNN;
}

bool variant_is_avg(Variant v) {
    return v == Variant::AvgRNN || v == Variant::ProjectedAvgRNN;
}

void ModelConfig::validate() const {
    if (embed_dim == 0 || gru_size == 0 || proj_width == 0 || head_width == 0 ||
        attn_hidden == 0 || max_len == 0) {
        throw ConfigError("model config: all dimensions must be positive");
    }
    if (attn_layers == 0 || head_layers == 0) {
        throw ConfigError("model config: attention and head MLPs need at least one hidden layer");
    }
    if (dropout_rate < 0.0 || dropout_rate >= 1.0) {
        throw ConfigError("model config: dropout_rate must be in [0, 1)");
    }
}

double ScoreVector::operator[](Category c) const {
    switch (c) {
        case Category::Harassment: return harassment;
        case Category::Indirect: return indirect;
        case Category::Sexual: return sexual;
        case Category::Physical: return physical;
    }
    throw ConfigError("bad category");
}

double& ScoreVector::operator[](Category c) {
    switch (c) {
        case Category::Harassment: return harassment;
        case Category::Indirect: return indirect;
        case Category::Sexual: return sexual;
        case Category::Physical: return physical;
    }
    throw ConfigError("bad category");
}

int LabelVector::operator[](Category c) const {
    switch (c) {
        case Category::Harassment: return harassment;
        case Category::Indirect: return indirect;
        case Category::Sexual: return sexual;
        case Category::Physical: return physical;
    }
    throw ConfigError("bad category");
}

int& LabelVector::operator[](Category c) {
    switch (c) {
        case Category::Harassment: return harassment;
        case Category::Indirect: return indirect;
        case Category::Sexual: return sexual;
        case Category::Physical: return physical;
    }
    throw ConfigError("bad category");
}

LabelVector decide(const ScoreVector& scores, double threshold) {
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw ConfigError("decide: threshold must be in (0, 1)");
    }
    LabelVector out;
    if (scores.harassment < threshold) return out;
    out.harassment = 1;
    // Highest type score wins; exact ties resolve sexual > indirect > physical.
    Category best = Category::Sexual;
    double best_score = scores.sexual;
    if (scores.indirect > best_score) {
        best = Category::Indirect;
        best_score = scores.indirect;
    }
    if (scores.physical > best_score) {
        best = Category::Physical;
    }
    out[best] = 1;
    return out;
}

Model::Model(const ModelConfig& config, const EmbeddingMatrix& embeddings) : config_(config) {
    config_.validate();
    if (embeddings.dim() != config_.embed_dim) {
        throw ConfigError("model: embedding dim " + std::to_string(embeddings.dim()) +
                          " does not match configured dim " + std::to_string(config_.embed_dim));
    }
    Rng rng(derive_seed(config_.seed, "init"));
    wire(embeddings.matrix, rng);
}

void Model::wire(const Tensor& embedding_matrix, Rng& rng) {
    embedding_ = &params_.add("embedding", embedding_matrix);
    std::size_t gru_in = config_.embed_dim;
    if (variant_is_projected(config_.variant)) {
        projection_ = add_projection(params_, "proj", config_.embed_dim, config_.proj_width, rng);
        gru_in = config_.proj_width;
    }
    gru_ = add_gru(params_, "gru", gru_in, config_.gru_size, rng);
    if (variant_uses_attention(config_.variant)) {
        if (variant_is_multi_attention(config_.variant)) {
            for (std::size_t c = 0; c < kNumCategories; ++c) {
                attentions_.push_back(add_attention(params_, std::string("attn.") + kCategoryNames[c],
                                                    config_.gru_size, config_.attn_hidden,
                                                    config_.attn_layers, rng));
            }
        } else {
            attentions_.push_back(add_attention(params_, "attn.shared", config_.gru_size,
                                                config_.attn_hidden, config_.attn_layers, rng));
        }
    }
    for (std::size_t c = 0; c < kNumCategories; ++c) {
        heads_[c] = add_head(params_, std::string("head.") + kCategoryNames[c], config_.gru_size,
                             config_.head_width, config_.head_layers, rng);
    }
}

std::array<double, kNumCategories> Model::forward(std::span<const std::size_t> tokens,
                                                  bool training, Rng* dropout_rng,
                                                  Caches* caches) const {
    if (tokens.empty()) throw ContractError("model: empty token sequence");
    if (caches == nullptr) throw ContractError("model: forward requires a cache object");
    const std::size_t k = tokens.size();
    const std::size_t d = config_.embed_dim;

    Tensor x({k, d});
    for (std::size_t t = 0; t < k; ++t) {
        if (tokens[t] >= embedding_->value.rows()) {
            throw ContractError("model: token index " + std::to_string(tokens[t]) +
                                " outside vocabulary of size " +
                                std::to_string(embedding_->value.rows()));
        }
        auto src = embedding_->value.row_span(tokens[t]);
        auto dst = x.row_span(t);
        for (std::size_t j = 0; j < d; ++j) dst[j] = src[j];
    }

    Tensor dropped =
        spatial_dropout(x, config_.dropout_rate, dropout_rng, training, &caches->dropout);

    const Tensor* gru_input = &dropped;
    Tensor projected;
    if (variant_is_projected(config_.variant)) {
        projected = project(dropped, projection_, &caches->projection);
        gru_input = &projected;
    }

    Tensor states = gru_forward(*gru_input, gru_, nullptr, &caches->gru);

    std::array<double, kNumCategories> probs{};
    if (variant_is_multi_attention(config_.variant)) {
        caches->attention.resize(kNumCategories);
        for (std::size_t c = 0; c < kNumCategories; ++c) {
            AttentionOut att = attention(states, attentions_[c], &caches->attention[c]);
            probs[c] = head(att.h_sum, heads_[c], &caches->heads[c]);
        }
    } else if (variant_uses_attention(config_.variant)) {
        caches->attention.resize(1);
        AttentionOut att = attention(states, attentions_[0], &caches->attention[0]);
        for (std::size_t c = 0; c < kNumCategories; ++c) {
            probs[c] = head(att.h_sum, heads_[c], &caches->heads[c]);
        }
    } else {
        Tensor pooled = variant_is_avg(config_.variant) ? mean_pool(states) : states.row(k - 1);
        for (std::size_t c = 0; c < kNumCategories; ++c) {
            probs[c] = head(pooled, heads_[c], &caches->heads[c]);
        }
    }

    caches->tokens.assign(tokens.begin(), tokens.end());
    caches->seq_len = k;
    return probs;
}

void Model::backward(const std::array<double, kNumCategories>& d_probs, const Caches& caches) {
    if (caches.seq_len == 0) throw StateError("model: backward called without a forward cache");
    const std::size_t k = caches.seq_len;
    const std::size_t m = config_.gru_size;

    Tensor d_states({k, m});
    if (variant_is_multi_attention(config_.variant)) {
        for (std::size_t c = 0; c < kNumCategories; ++c) {
            Tensor d_hsum = head_backward(d_probs[c], heads_[c], caches.heads[c]);
            add_inplace(d_states, attention_backward(d_hsum, attentions_[c], caches.attention[c]));
        }
    } else if (variant_uses_attention(config_.variant)) {
        Tensor d_hsum({m});
        for (std::size_t c = 0; c < kNumCategories; ++c) {
            add_inplace(d_hsum, head_backward(d_probs[c], heads_[c], caches.heads[c]));
        }
        d_states = attention_backward(d_hsum, attentions_[0], caches.attention[0]);
    } else if (variant_is_avg(config_.variant)) {
        Tensor d_pooled({m});
        for (std::size_t c = 0; c < kNumCategories; ++c) {
            add_inplace(d_pooled, head_backward(d_probs[c], heads_[c], caches.heads[c]));
        }
        d_states = mean_pool_backward(d_pooled, k);
    } else {
        Tensor d_last({m});
        for (std::size_t c = 0; c < kNumCategories; ++c) {
            add_inplace(d_last, head_backward(d_probs[c], heads_[c], caches.heads[c]));
        }
        d_states.set_row(k - 1, d_last);
    }

    Tensor d_gru_in = gru_backward(d_states, gru_, caches.gru);
    if (variant_is_projected(config_.variant)) {
        d_gru_in = project_backward(d_gru_in, projection_, caches.projection);
    }
    Tensor d_embedded = spatial_dropout_backward(d_gru_in, caches.dropout);

    for (std::size_t t = 0; t < k; ++t) {
        auto src = d_embedded.row_span(t);
        auto dst = embedding_->grad.row_span(caches.tokens[t]);
        for (std::size_t j = 0; j < src.size(); ++j) dst[j] += src[j];
    }
}

ScoreVector Model::score(std::span<const std::size_t> tokens) const {
    Caches caches;
    const auto p = forward(tokens, /*training=*/false, nullptr, &caches);
    ScoreVector out;
    out.harassment = p[0];
    out.indirect = p[1];
    out.sexual = p[2];
    out.physical = p[3];
    return out;
}

// --- checkpoint format ---------------------------------------------------------
//
//   magic "HDETCKPT" | u32 version | u32 json_len | config JSON |
//   u64 tensor_count | per tensor: u32 name_len, name, u32 ndim, u64 dims...,
//   f64 values (little-endian)

namespace {

constexpr char kMagic[8] = {'H', 'D', 'E', 'T', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
    out.write(reinterpret_cast<const char*>(b), 8);
}

void write_f64(std::ostream& out, double v) { write_u64(out, std::bit_cast<std::uint64_t>(v)); }

void read_bytes(std::istream& in, void* dst, std::size_t n) {
    in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
        throw CheckpointError("checkpoint: file truncated");
    }
}

std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    read_bytes(in, b, 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

std::uint64_t read_u64(std::istream& in) {
    unsigned char b[8];
    read_bytes(in, b, 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

double read_f64(std::istream& in) { return std::bit_cast<double>(read_u64(in)); }

nlohmann::json config_to_json(const ModelConfig& c) {
    return {
        {"variant", variant_name(c.variant)},
        {"embed_dim", c.embed_dim},
        {"gru_size", c.gru_size},
        {"proj_width", c.proj_width},
        {"head_width", c.head_width},
        {"attn_hidden", c.attn_hidden},
        {"attn_layers", c.attn_layers},
        {"head_layers", c.head_layers},
        {"dropout_rate", c.dropout_rate},
        {"max_len", c.max_len},
        {"seed", c.seed},
    };
}

ModelConfig config_from_json(const nlohmann::json& j) {
    ModelConfig c;
    c.variant = variant_from_name(j.at("variant").get<std::string>());
    c.embed_dim = j.at("embed_dim").get<std::size_t>();
    c.gru_size = j.at("gru_size").get<std::size_t>();
    c.proj_width = j.at("proj_width").get<std::size_t>();
    c.head_width = j.at("head_width").get<std::size_t>();
    c.attn_hidden = j.at("attn_hidden").get<std::size_t>();
    c.attn_layers = j.at("attn_layers").get<std::size_t>();
    c.head_layers = j.at("head_layers").get<std::size_t>();
    c.dropout_rate = j.at("dropout_rate").get<double>();
    c.max_len = j.at("max_len").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

}  // namespace

void Model::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("checkpoint: cannot write " + path.string());

    out.write(kMagic, sizeof(kMagic));
    write_u32(out, kVersion);
    const std::string cfg = config_to_json(config_).dump();
    write_u32(out, static_cast<std::uint32_t>(cfg.size()));
    out.write(cfg.data(), static_cast<std::streamsize>(cfg.size()));

    write_u64(out, params_.count());
    for (const auto& entry : params_) {
        write_u32(out, static_cast<std::uint32_t>(entry->name.size()));
        out.write(entry->name.data(), static_cast<std::streamsize>(entry->name.size()));
        write_u32(out, static_cast<std::uint32_t>(entry->value.ndim()));
        for (std::size_t dim : entry->value.shape()) write_u64(out, dim);
        for (std::size_t i = 0; i < entry->value.size(); ++i) write_f64(out, entry->value[i]);
    }
    if (!out) throw IoError("checkpoint: write failed for " + path.string());
}

Model Model::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("checkpoint: cannot open " + path.string());

    char magic[8];
    read_bytes(in, magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw CheckpointError("checkpoint: bad magic in " + path.string());
    }
    const std::uint32_t version = read_u32(in);
    if (version != kVersion) {
        throw CheckpointError("checkpoint: unsupported format version " + std::to_string(version));
    }
    const std::uint32_t cfg_len = read_u32(in);
    std::string cfg_str(cfg_len, '\0');
    read_bytes(in, cfg_str.data(), cfg_len);
    ModelConfig config;
    try {
        config = config_from_json(nlohmann::json::parse(cfg_str));
    } catch (const nlohmann::json::exception& e) {
        throw CheckpointError(std::string("checkpoint: bad config block: ") + e.what());
    }

    const std::uint64_t tensor_count = read_u64(in);
    std::unordered_map<std::string, Tensor> tensors;
    for (std::uint64_t i = 0; i < tensor_count; ++i) {
        const std::uint32_t name_len = read_u32(in);
        std::string name(name_len, '\0');
        read_bytes(in, name.data(), name_len);
        const std::uint32_t ndim = read_u32(in);
        std::vector<std::size_t> shape(ndim);
        std::size_t size = 1;
        for (std::uint32_t d = 0; d < ndim; ++d) {
            shape[d] = static_cast<std::size_t>(read_u64(in));
            size *= shape[d];
        }
        std::vector<double> data(size);
        for (std::size_t v = 0; v < size; ++v) data[v] = read_f64(in);
        tensors.emplace(std::move(name), Tensor(std::move(shape), std::move(data)));
    }

    auto emb_it = tensors.find("embedding");
    if (emb_it == tensors.end()) throw CheckpointError("checkpoint: missing embedding tensor");
    EmbeddingMatrix emb{emb_it->second};
    Model model(config, emb);

    if (tensors.size() != model.params_.count()) {
        throw CheckpointError("checkpoint: tensor count " + std::to_string(tensors.size()) +
                              " does not match model with " + std::to_string(model.params_.count()) +
                              " parameter blocks");
    }
    for (auto& entry : model.params_) {
        auto it = tensors.find(entry->name);
        if (it == tensors.end()) {
            throw CheckpointError("checkpoint: missing tensor '" + entry->name + "'");
        }
        if (!it->second.same_shape(entry->value)) {
            throw CheckpointError("checkpoint: tensor '" + entry->name + "' has shape " +
                                  it->second.shape_str() + ", expected " + entry->value.shape_str());
        }
        entry->value = std::move(it->second);
    }
    return model;
}

}  // namespace hdet
