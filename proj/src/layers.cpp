#include "hdet/layers.hpp"

#include <algorithm>
#include <cmath>

#include "hdet/errors.hpp"

namespace hdet {

namespace {

void require_cache(bool valid, const char* layer) {
    if (!valid) throw StateError(std::string(layer) + ": backward called without a forward cache");
}

}  // namespace

// --- spatial dropout ---------------------------------------------------------

Tensor spatial_dropout(const Tensor& seq, double rate, Rng* rng, bool training,
                       DropoutCache* cache) {
    if (rate < 0.0 || rate >= 1.0) {
        throw ConfigError("spatial_dropout: rate must be in [0, 1), got " + std::to_string(rate));
    }
    const std::size_t k = seq.rows(), d = seq.cols();
    Tensor mask({d});
    if (!training || rate == 0.0) {
        mask.fill(1.0);
    } else {
        if (rng == nullptr) throw ContractError("spatial_dropout: training with rate > 0 needs an rng");
        const double keep_scale = 1.0 / (1.0 - rate);
        for (std::size_t j = 0; j < d; ++j) {
            mask[j] = rng->bernoulli(1.0 - rate) ? keep_scale : 0.0;
        }
    }
    Tensor out({k, d});
    for (std::size_t t = 0; t < k; ++t) {
        auto in_row = seq.row_span(t);
        auto out_row = out.row_span(t);
        for (std::size_t j = 0; j < d; ++j) out_row[j] = in_row[j] * mask[j];
    }
    if (cache) {
        cache->mask = std::move(mask);
        cache->valid = true;
    }
    return out;
}

Tensor spatial_dropout_backward(const Tensor& d_out, const DropoutCache& cache) {
    require_cache(cache.valid, "spatial_dropout");
    const std::size_t k = d_out.rows(), d = d_out.cols();
    if (cache.mask.size() != d) {
        throw ShapeError("spatial_dropout backward: mask " + cache.mask.shape_str() +
                         " vs upstream " + d_out.shape_str());
    }
    Tensor d_in({k, d});
    for (std::size_t t = 0; t < k; ++t) {
        auto up = d_out.row_span(t);
        auto down = d_in.row_span(t);
        for (std::size_t j = 0; j < d; ++j) down[j] = up[j] * cache.mask[j];
    }
    return d_in;
}

// --- projection --------------------------------------------------------------

ProjectionParams add_projection(ParamStore& store, const std::string& prefix, std::size_t in_dim,
                                std::size_t out_dim, Rng& rng) {
    ProjectionParams p;
    p.W = &store.add(prefix + ".W", init({out_dim, in_dim}, InitSpec::glorot(), rng));
    p.b = &store.add(prefix + ".b", Tensor({out_dim}));
    return p;
}

Tensor project(const Tensor& seq, const ProjectionParams& p, ProjectionCache* cache) {
    const std::size_t k = seq.rows();
    const std::size_t out_dim = p.W->value.rows();
    if (seq.cols() != p.W->value.cols()) {
        throw ShapeError("project: input " + seq.shape_str() + " vs W " + p.W->value.shape_str());
    }
    Tensor out({k, out_dim});
    for (std::size_t t = 0; t < k; ++t) {
        Tensor a = matvec(p.W->value, seq.row(t));
        add_inplace(a, p.b->value);
        out.set_row(t, tanh(a));
    }
    if (cache) {
        cache->input = seq;
        cache->output = out;
        cache->valid = true;
    }
    return out;
}

Tensor project_backward(const Tensor& d_out, const ProjectionParams& p,
                        const ProjectionCache& cache) {
    require_cache(cache.valid, "project");
    const std::size_t k = cache.input.rows();
    Tensor d_in(cache.input.shape());
    for (std::size_t t = 0; t < k; ++t) {
        const Tensor y = cache.output.row(t);
        Tensor da = d_out.row(t);
        for (std::size_t j = 0; j < da.size(); ++j) da[j] *= (1.0 - y[j] * y[j]);
        add_outer(p.W->grad, da, cache.input.row(t));
        add_inplace(p.b->grad, da);
        d_in.set_row(t, matvec_transposed(p.W->value, da));
    }
    return d_in;
}

// --- GRU ---------------------------------------------------------------------

GruParams add_gru(ParamStore& store, const std::string& prefix, std::size_t in_dim,
                  std::size_t hidden, Rng& rng) {
    GruParams p;
    p.in_dim = in_dim;
    p.hidden = hidden;
    auto mat = [&](const char* name, std::size_t r, std::size_t c) {
        return &store.add(prefix + "." + name, init({r, c}, InitSpec::glorot(), rng));
    };
    auto vec = [&](const char* name) { return &store.add(prefix + "." + name, Tensor({hidden})); };
    p.W_z = mat("W_z", hidden, in_dim);
    p.U_z = mat("U_z", hidden, hidden);
    p.b_z = vec("b_z");
    p.W_r = mat("W_r", hidden, in_dim);
    p.U_r = mat("U_r", hidden, hidden);
    p.b_r = vec("b_r");
    p.W_h = mat("W_h", hidden, in_dim);
    p.U_h = mat("U_h", hidden, hidden);
    p.b_h = vec("b_h");
    return p;
}

namespace {

struct GruStep {
    Tensor z, r, hbar, h;
};

GruStep gru_step(const Tensor& x_t, const Tensor& h_prev, const GruParams& p) {
    GruStep s;
    Tensor az = matvec(p.W_z->value, x_t);
    add_inplace(az, matvec(p.U_z->value, h_prev));
    add_inplace(az, p.b_z->value);
    s.z = sigmoid(az);

    Tensor ar = matvec(p.W_r->value, x_t);
    add_inplace(ar, matvec(p.U_r->value, h_prev));
    add_inplace(ar, p.b_r->value);
    s.r = sigmoid(ar);

    Tensor ah = matvec(p.W_h->value, x_t);
    add_inplace(ah, matvec(p.U_h->value, mul(s.r, h_prev)));
    add_inplace(ah, p.b_h->value);
    s.hbar = tanh(ah);

    s.h = Tensor({p.hidden});
    for (std::size_t i = 0; i < p.hidden; ++i) {
        s.h[i] = (1.0 - s.z[i]) * h_prev[i] + s.z[i] * s.hbar[i];
    }
    return s;
}

}  // namespace

Tensor gru_cell(const Tensor& x_t, const Tensor& h_prev, const GruParams& p) {
    if (x_t.size() != p.in_dim || h_prev.size() != p.hidden) {
        throw ShapeError("gru_cell: x " + x_t.shape_str() + ", h " + h_prev.shape_str() +
                         " vs in_dim " + std::to_string(p.in_dim) + ", hidden " +
                         std::to_string(p.hidden));
    }
    return gru_step(x_t, h_prev, p).h;
}

Tensor gru_forward(const Tensor& seq, const GruParams& p, const Tensor* h0, GruCache* cache) {
    const std::size_t k = seq.rows();
    if (k == 0) throw ContractError("gru_forward: empty sequence (encode guarantees k >= 1)");
    if (seq.cols() != p.in_dim) {
        throw ShapeError("gru_forward: input " + seq.shape_str() + " vs in_dim " +
                         std::to_string(p.in_dim));
    }
    Tensor h = h0 ? *h0 : Tensor({p.hidden});
    if (h.size() != p.hidden) {
        throw ShapeError("gru_forward: h0 " + h.shape_str() + " vs hidden " + std::to_string(p.hidden));
    }
    Tensor states({k, p.hidden});
    if (cache) {
        cache->input = seq;
        cache->h.assign(1, h);
        cache->z.clear();
        cache->r.clear();
        cache->hbar.clear();
    }
    for (std::size_t t = 0; t < k; ++t) {
        GruStep s = gru_step(seq.row(t), h, p);
        states.set_row(t, s.h);
        h = s.h;
        if (cache) {
            cache->h.push_back(s.h);
            cache->z.push_back(std::move(s.z));
            cache->r.push_back(std::move(s.r));
            cache->hbar.push_back(std::move(s.hbar));
        }
    }
    if (cache) cache->valid = true;
    return states;
}

Tensor gru_backward(const Tensor& d_states, const GruParams& p, const GruCache& cache) {
    require_cache(cache.valid, "gru");
    const std::size_t k = cache.input.rows();
    const std::size_t m = p.hidden;
    if (d_states.rows() != k || d_states.cols() != m) {
        throw ShapeError("gru_backward: upstream " + d_states.shape_str());
    }
    Tensor d_in(cache.input.shape());
    Tensor carry({m});  // dL/dh_t flowing from step t+1
    for (std::size_t ti = k; ti-- > 0;) {
        const Tensor& h_prev = cache.h[ti];
        const Tensor& z = cache.z[ti];
        const Tensor& r = cache.r[ti];
        const Tensor& hbar = cache.hbar[ti];
        const Tensor x_t = cache.input.row(ti);

        Tensor dh = d_states.row(ti);
        add_inplace(dh, carry);

        Tensor daz({m}), dar({m}), dah({m}), dh_prev({m});
        for (std::size_t i = 0; i < m; ++i) {
            const double dz = dh[i] * (hbar[i] - h_prev[i]);
            daz[i] = dz * z[i] * (1.0 - z[i]);
            dah[i] = dh[i] * z[i] * (1.0 - hbar[i] * hbar[i]);
            dh_prev[i] = dh[i] * (1.0 - z[i]);
        }
        // candidate path: ah = W_h x + U_h (r . h_prev) + b_h
        add_outer(p.W_h->grad, dah, x_t);
        add_outer(p.U_h->grad, dah, mul(r, h_prev));
        add_inplace(p.b_h->grad, dah);
        Tensor dq = matvec_transposed(p.U_h->value, dah);  // q = r . h_prev
        for (std::size_t i = 0; i < m; ++i) {
            dar[i] = dq[i] * h_prev[i] * r[i] * (1.0 - r[i]);
            dh_prev[i] += dq[i] * r[i];
        }
        // gate paths
        add_outer(p.W_r->grad, dar, x_t);
        add_outer(p.U_r->grad, dar, h_prev);
        add_inplace(p.b_r->grad, dar);
        add_inplace(dh_prev, matvec_transposed(p.U_r->value, dar));

        add_outer(p.W_z->grad, daz, x_t);
        add_outer(p.U_z->grad, daz, h_prev);
        add_inplace(p.b_z->grad, daz);
        add_inplace(dh_prev, matvec_transposed(p.U_z->value, daz));

        Tensor dx = matvec_transposed(p.W_h->value, dah);
        add_inplace(dx, matvec_transposed(p.W_r->value, dar));
        add_inplace(dx, matvec_transposed(p.W_z->value, daz));
        d_in.set_row(ti, dx);

        carry = std::move(dh_prev);
    }
    return d_in;
}

// --- attention ---------------------------------------------------------------

Tensor softmax(const Tensor& scores) {
    Tensor out(scores.shape());
    double hi = scores[0];
    for (std::size_t i = 1; i < scores.size(); ++i) hi = std::max(hi, scores[i]);
    double sum = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        out[i] = std::exp(scores[i] - hi);
        sum += out[i];
    }
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] /= sum;
    return out;
}

AttentionParams add_attention(ParamStore& store, const std::string& prefix, std::size_t state_dim,
                              std::size_t hidden, std::size_t layers, Rng& rng) {
    AttentionParams p;
    std::size_t in = state_dim;
    for (std::size_t l = 0; l < layers; ++l) {
        const std::string base = prefix + "." + std::to_string(l);
        p.Ws.push_back(&store.add(base + ".W", init({hidden, in}, InitSpec::glorot(), rng)));
        p.bs.push_back(&store.add(base + ".b", Tensor({hidden})));
        in = hidden;
    }
    p.w_out = &store.add(prefix + ".out.w", init({in}, InitSpec::glorot(), rng));
    p.b_out = &store.add(prefix + ".out.b", Tensor({1}));
    return p;
}

AttentionOut attention(const Tensor& states, const AttentionParams& p, AttentionCache* cache) {
    const std::size_t k = states.rows(), m = states.cols();
    if (k == 0) throw ContractError("attention: empty state sequence");
    Tensor scores({k});
    std::vector<std::vector<Tensor>> units(k);
    for (std::size_t t = 0; t < k; ++t) {
        Tensor u = states.row(t);
        units[t].push_back(u);
        for (std::size_t l = 0; l < p.Ws.size(); ++l) {
            Tensor a = matvec(p.Ws[l]->value, u);
            add_inplace(a, p.bs[l]->value);
            u = tanh(a);
            units[t].push_back(u);
        }
        scores[t] = dot(p.w_out->value, u) + p.b_out->value[0];
    }
    AttentionOut out;
    out.alphas = softmax(scores);
    out.h_sum = Tensor({m});
    for (std::size_t t = 0; t < k; ++t) {
        axpy(out.h_sum, out.alphas[t], states.row(t));
    }
    if (cache) {
        cache->states = states;
        cache->units = std::move(units);
        cache->alphas = out.alphas;
        cache->valid = true;
    }
    return out;
}

Tensor attention_backward(const Tensor& d_hsum, const AttentionParams& p,
                          const AttentionCache& cache) {
    require_cache(cache.valid, "attention");
    const std::size_t k = cache.states.rows();
    const Tensor& alphas = cache.alphas;

    Tensor d_states(cache.states.shape());
    Tensor d_alpha({k});
    for (std::size_t t = 0; t < k; ++t) {
        d_alpha[t] = dot(d_hsum, cache.states.row(t));
        d_states.set_row(t, scale(d_hsum, alphas[t]));
    }
    // softmax backward: de_t = a_t (dalpha_t - sum_s a_s dalpha_s)
    double mix = 0.0;
    for (std::size_t t = 0; t < k; ++t) mix += alphas[t] * d_alpha[t];
    for (std::size_t t = 0; t < k; ++t) {
        const double de = alphas[t] * (d_alpha[t] - mix);
        const std::size_t depth = p.Ws.size();
        const Tensor& top = cache.units[t][depth];
        axpy(p.w_out->grad, de, top);
        p.b_out->grad[0] += de;
        Tensor du = scale(p.w_out->value, de);
        for (std::size_t l = depth; l-- > 0;) {
            const Tensor& u = cache.units[t][l + 1];
            for (std::size_t i = 0; i < du.size(); ++i) du[i] *= (1.0 - u[i] * u[i]);
            add_outer(p.Ws[l]->grad, du, cache.units[t][l]);
            add_inplace(p.bs[l]->grad, du);
            du = matvec_transposed(p.Ws[l]->value, du);
        }
        Tensor row = d_states.row(t);
        add_inplace(row, du);
        d_states.set_row(t, row);
    }
    return d_states;
}

// --- output head ---------------------------------------------------------------

HeadParams add_head(ParamStore& store, const std::string& prefix, std::size_t in_dim,
                    std::size_t hidden, std::size_t layers, Rng& rng) {
    HeadParams p;
    std::size_t in = in_dim;
    for (std::size_t l = 0; l < layers; ++l) {
        const std::string base = prefix + "." + std::to_string(l);
        p.Ws.push_back(&store.add(base + ".W", init({hidden, in}, InitSpec::glorot(), rng)));
        p.bs.push_back(&store.add(base + ".b", Tensor({hidden})));
        in = hidden;
    }
    p.w_out = &store.add(prefix + ".out.w", init({in}, InitSpec::glorot(), rng));
    p.b_out = &store.add(prefix + ".out.b", Tensor({1}));
    return p;
}

double head(const Tensor& h, const HeadParams& p, HeadCache* cache) {
    Tensor u = h;
    std::vector<Tensor> units;
    units.push_back(u);
    for (std::size_t l = 0; l < p.Ws.size(); ++l) {
        Tensor a = matvec(p.Ws[l]->value, u);
        add_inplace(a, p.bs[l]->value);
        u = relu(a);
        units.push_back(u);
    }
    const double logit = dot(p.w_out->value, u) + p.b_out->value[0];
    const double prob = sigmoid_scalar(logit);
    if (cache) {
        cache->units = std::move(units);
        cache->prob = prob;
        cache->valid = true;
    }
    return prob;
}

Tensor head_backward(double d_prob, const HeadParams& p, const HeadCache& cache) {
    require_cache(cache.valid, "head");
    const double dlogit = d_prob * cache.prob * (1.0 - cache.prob);
    const std::size_t depth = p.Ws.size();
    axpy(p.w_out->grad, dlogit, cache.units[depth]);
    p.b_out->grad[0] += dlogit;
    Tensor du = scale(p.w_out->value, dlogit);
    for (std::size_t l = depth; l-- > 0;) {
        const Tensor& u = cache.units[l + 1];
        for (std::size_t i = 0; i < du.size(); ++i) {
            if (u[i] <= 0.0) du[i] = 0.0;  // relu subgradient
        }
        add_outer(p.Ws[l]->grad, du, cache.units[l]);
        add_inplace(p.bs[l]->grad, du);
        du = matvec_transposed(p.Ws[l]->value, du);
    }
    return du;
}

// --- pooling -------------------------------------------------------------------

Tensor mean_pool(const Tensor& states) {
    const std::size_t k = states.rows(), m = states.cols();
    if (k == 0) throw ContractError("mean_pool: empty state sequence");
    Tensor out({m});
    for (std::size_t t = 0; t < k; ++t) {
        add_inplace(out, states.row(t));
    }
    for (std::size_t i = 0; i < m; ++i) out[i] /= static_cast<double>(k);
    return out;
}

Tensor mean_pool_backward(const Tensor& d_pooled, std::size_t k) {
    Tensor d_states({k, d_pooled.size()});
    const double inv = 1.0 / static_cast<double>(k);
    for (std::size_t t = 0; t < k; ++t) {
        d_states.set_row(t, scale(d_pooled, inv));
    }
    return d_states;
}

}  // namespace hdet
