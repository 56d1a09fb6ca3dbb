#include "hdet/adam.hpp"

#include <cmath>

#include "hdet/errors.hpp"

namespace hdet {

Adam::Adam(AdamConfig config) : config_(config) {
    if (!(config_.lr > 0.0)) throw ConfigError("adam: lr must be positive");
    if (config_.beta1 < 0.0 || config_.beta1 >= 1.0 || config_.beta2 < 0.0 || config_.beta2 >= 1.0) {
        throw ConfigError("adam: betas must be in [0, 1)");
    }
    if (!(config_.eps > 0.0)) throw ConfigError("adam: eps must be positive");
}

void Adam::step(ParamStore& params) {
    if (m_.empty()) {
        for (const auto& entry : params) {
            m_.push_back(Tensor::zeros_like(entry->value));
            v_.push_back(Tensor::zeros_like(entry->value));
        }
    } else if (m_.size() != params.count()) {
        throw StateError("adam: parameter store changed size after first step");
    }

    for (std::size_t idx = 0; idx < params.count(); ++idx) {
        const Param& p = **(params.begin() + idx);
        if (!p.grad.all_finite()) {
            throw NumericError("adam: non-finite gradient in '" + p.name + "'");
        }
    }

    ++t_;
    const double corr1 = 1.0 - std::pow(config_.beta1, static_cast<double>(t_));
    const double corr2 = 1.0 - std::pow(config_.beta2, static_cast<double>(t_));

    std::size_t idx = 0;
    for (auto& entry : params) {
        Param& p = *entry;
        Tensor& m = m_[idx];
        Tensor& v = v_[idx];
        ++idx;
        if (!p.trainable) continue;
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            const double g = p.grad[i];
            m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
            v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
            const double m_hat = m[i] / corr1;
            const double v_hat = v[i] / corr2;
            p.value[i] -= config_.lr * m_hat / (std::sqrt(v_hat) + config_.eps);
        }
    }
}

}  // namespace hdet
