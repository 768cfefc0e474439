#include "mixar/simulator.hpp"

#include "mixar/errors.hpp"

namespace mixar {

bool MarModel::valid() const {
    if (!(dist.nu > 0.0) || !(dist.eta > 0.0)) return false;
    return is_stationary(causal()) && is_stationary(noncausal());
}

Series simulate_mar(const SimConfig& cfg) {
    if (cfg.T < 1) throw InvalidInput("simulate_mar: T must be at least 1");
    cfg.model.dist.validate();
    if (!is_stationary(cfg.model.causal()) || !is_stationary(cfg.model.noncausal())) {
        throw DomainError("simulate_mar: model polynomials must be stationary");
    }

    const std::size_t burn = cfg.burn;
    const std::size_t n = cfg.T + 2 * burn;
    Series eps(n);
    StudentTSampler draw(cfg.model.dist, cfg.seed);
    for (std::size_t t = 0; t < cfg.T; ++t) eps[burn + t] = draw();
    // Burn-in draws alternate outward from the window so a longer burn-in
    // keeps every innovation near the sample unchanged.
    for (std::size_t k = 0; k < burn; ++k) {
        eps[burn - 1 - k] = draw();
        eps[burn + cfg.T + k] = draw();
    }

    const auto& phi = cfg.model.phi;
    const auto& vphi = cfg.model.vphi;

    Series w(n, 0.0);
    for (std::size_t t = n; t-- > 0;) {
        double v = eps[t];
        for (std::size_t j = 1; j <= vphi.size() && t + j < n; ++j) v += vphi[j - 1] * w[t + j];
        w[t] = v;
    }
    Series y(n, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        double v = w[t];
        for (std::size_t i = 1; i <= phi.size() && i <= t; ++i) v += phi[i - 1] * y[t - i];
        y[t] = v;
    }
    return Series(y.begin() + static_cast<std::ptrdiff_t>(burn),
                  y.begin() + static_cast<std::ptrdiff_t>(burn + cfg.T));
}

Series residuals(std::span<const double> y, const MarModel& model) {
    if (y.size() <= model.p()) throw InvalidInput("residuals: series must be longer than r + s");
    return filter_noncausal(filter_causal(y, model.causal()), model.noncausal());
}

}  // namespace mixar
