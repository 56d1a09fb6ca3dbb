#include "hdet/grad_check.hpp"

#include <cmath>

#include "hdet/errors.hpp"

namespace hdet {

double grad_check(const std::function<double()>& loss, ParamStore& params, double eps,
                  double floor) {
    if (!(eps > 0.0)) throw ConfigError("grad_check: eps must be positive");
    double max_rel = 0.0;
    for (auto& entry : params) {
        Param& p = *entry;
        for (std::size_t i = 0; i < p.value.size(); ++i) {
            const double saved = p.value[i];
            p.value[i] = saved + eps;
            const double up = loss();
            p.value[i] = saved - eps;
            const double down = loss();
            p.value[i] = saved;
            if (!std::isfinite(up) || !std::isfinite(down)) {
                throw NumericError("grad_check: non-finite loss while perturbing '" + p.name + "'");
            }
            const double numeric = (up - down) / (2.0 * eps);
            const double analytic = p.grad[i];
            const double rel =
                std::abs(analytic - numeric) / std::max(floor, std::abs(analytic) + std::abs(numeric));
            if (rel > max_rel) max_rel = rel;
        }
    }
    return max_rel;
}

}  // namespace hdet
