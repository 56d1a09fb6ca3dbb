#pragma once

#include <cstdint>
#include <vector>

#include "hdet/param_store.hpp"

namespace hdet {

struct AdamConfig {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Bias-corrected Adam. Moment buffers mirror the store's parameter order and
// are sized lazily on the first step. Non-trainable parameters are skipped;
// a non-finite gradient aborts the step with a NumericError naming the tensor.
class Adam {
  public:
    explicit Adam(AdamConfig config);

    void step(ParamStore& params);

    std::uint64_t steps_taken() const { return t_; }

  private:
    AdamConfig config_;
    std::uint64_t t_ = 0;
    std::vector<Tensor> m_, v_;
};

}  // namespace hdet
