#pragma once

#include <string>
#include <vector>

#include "hdet/param_store.hpp"
#include "hdet/rng.hpp"
#include "hdet/tensor.hpp"

namespace hdet {

// Every layer follows the same protocol: forward optionally fills a cache;
// backward consumes the cache, accumulates parameter gradients into the store
// and returns the gradient w.r.t. the layer input. Backward without a prior
// forward (cache.valid == false) raises StateError.

// --- spatial dropout ---------------------------------------------------------

struct DropoutCache {
    Tensor mask;  // length d, entries 0 or 1/(1-rate)
    bool valid = false;
};

// Draws ONE Bernoulli(1-rate) mask over the embedding dimensions and applies it
// at every sequence position (inverted dropout: survivors scaled by 1/(1-rate)).
// Identity when training is false or rate == 0; the rng may be null in that
// case. rate >= 1 is a config error.
Tensor spatial_dropout(const Tensor& seq, double rate, Rng* rng, bool training,
                       DropoutCache* cache = nullptr);
Tensor spatial_dropout_backward(const Tensor& d_out, const DropoutCache& cache);

// --- projection --------------------------------------------------------------

struct ProjectionParams {
    Param* W = nullptr;  // p x d
    Param* b = nullptr;  // p
};

ProjectionParams add_projection(ParamStore& store, const std::string& prefix, std::size_t in_dim,
                                std::size_t out_dim, Rng& rng);

struct ProjectionCache {
    Tensor input;   // k x d
    Tensor output;  // k x p
    bool valid = false;
};

// Per position t: tanh(W x_t + b).
Tensor project(const Tensor& seq, const ProjectionParams& p, ProjectionCache* cache = nullptr);
Tensor project_backward(const Tensor& d_out, const ProjectionParams& p, const ProjectionCache& cache);

// --- GRU ---------------------------------------------------------------------

struct GruParams {
    Param *W_h = nullptr, *U_h = nullptr, *b_h = nullptr;
    Param *W_z = nullptr, *U_z = nullptr, *b_z = nullptr;
    Param *W_r = nullptr, *U_r = nullptr, *b_r = nullptr;
    std::size_t in_dim = 0;
    std::size_t hidden = 0;
};

GruParams add_gru(ParamStore& store, const std::string& prefix, std::size_t in_dim,
                  std::size_t hidden, Rng& rng);

//   z_t = sigma(W_z x_t + U_z h_{t-1} + b_z)
//   r_t = sigma(W_r x_t + U_r h_{t-1} + b_r)
//   h'_t = tanh(W_h x_t + U_h (r_t . h_{t-1}) + b_h)
//   h_t = (1 - z_t) . h_{t-1} + z_t . h'_t
Tensor gru_cell(const Tensor& x_t, const Tensor& h_prev, const GruParams& p);

struct GruCache {
    Tensor input;             // k x in_dim
    std::vector<Tensor> h;    // h_0 .. h_k  (k+1 entries)
    std::vector<Tensor> z, r, hbar;  // per step
    bool valid = false;
};

// Runs the chain from h0 (zeros when omitted) and returns all k states.
// k == 0 violates the encode contract and raises ContractError.
Tensor gru_forward(const Tensor& seq, const GruParams& p, const Tensor* h0 = nullptr,
                   GruCache* cache = nullptr);
Tensor gru_backward(const Tensor& d_states, const GruParams& p, const GruCache& cache);

// --- attention ---------------------------------------------------------------

// Score MLP: `layers` hidden tanh layers of width `hidden`, then a scalar
// linear output. Per-position scores are softmax-normalized into weights.
struct AttentionParams {
    std::vector<Param*> Ws;  // hidden layer weights
    std::vector<Param*> bs;
    Param* w_out = nullptr;  // scalar output layer
    Param* b_out = nullptr;
};

AttentionParams add_attention(ParamStore& store, const std::string& prefix, std::size_t state_dim,
                              std::size_t hidden, std::size_t layers, Rng& rng);

struct AttentionCache {
    Tensor states;                           // k x m
    std::vector<std::vector<Tensor>> units;  // per position, per hidden layer activations
    Tensor alphas;                           // k
    bool valid = false;
};

struct AttentionOut {
    Tensor alphas;  // k, positive, sums to 1
    Tensor h_sum;   // m
};

AttentionOut attention(const Tensor& states, const AttentionParams& p,
                       AttentionCache* cache = nullptr);
Tensor attention_backward(const Tensor& d_hsum, const AttentionParams& p,
                          const AttentionCache& cache);

// --- output head ---------------------------------------------------------------

// `layers` hidden ReLU layers of width `hidden`, then sigma(w . u + b).
struct HeadParams {
    std::vector<Param*> Ws;
    std::vector<Param*> bs;
    Param* w_out = nullptr;
    Param* b_out = nullptr;
};

HeadParams add_head(ParamStore& store, const std::string& prefix, std::size_t in_dim,
                    std::size_t hidden, std::size_t layers, Rng& rng);

struct HeadCache {
    std::vector<Tensor> units;  // input + hidden activations
    double prob = 0.0;
    bool valid = false;
};

double head(const Tensor& h, const HeadParams& p, HeadCache* cache = nullptr);
Tensor head_backward(double d_prob, const HeadParams& p, const HeadCache& cache);

// --- pooling -------------------------------------------------------------------

Tensor mean_pool(const Tensor& states);
Tensor mean_pool_backward(const Tensor& d_pooled, std::size_t k);

// Softmax with max subtraction; used by attention and exposed for tests.
Tensor softmax(const Tensor& scores);

}  // namespace hdet
