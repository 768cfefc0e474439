#include "mixar/tdist.hpp"

#include "mixar/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace mixar {

void TParams::validate() const {
    if (!(nu > 0.0) || !(eta > 0.0) || !std::isfinite(nu) || !std::isfinite(eta)) {
        throw DomainError("Student's t parameters require nu > 0 and eta > 0");
    }
}

namespace {

const TParams& validated(const TParams& p) {
    p.validate();
    return p;
}

double log_normalizer(const TParams& p) {
    return std::lgamma(0.5 * (p.nu + 1.0)) - std::lgamma(0.5 * p.nu) -
           0.5 * std::log(p.nu * std::numbers::pi) - std::log(p.eta);
}

}  // namespace

double log_density(double eps, const TParams& p) {
    p.validate();
    if (!std::isfinite(eps)) throw InvalidInput("log_density: eps must be finite");
    const double z = eps / p.eta;
    return log_normalizer(p) - 0.5 * (p.nu + 1.0) * std::log1p(z * z / p.nu);
}

double loglik_residuals(std::span<const double> eps, const TParams& p) {
    p.validate();
    const double inv_scale = 1.0 / (p.nu * p.eta * p.eta);
    double tail = 0.0;
    for (double e : eps) tail += std::log1p(e * e * inv_scale);
    return static_cast<double>(eps.size()) * log_normalizer(p) - 0.5 * (p.nu + 1.0) * tail;
}

double loglik(std::span<const double> y, const LagPolynomial& phi, const LagPolynomial& vphi,
              const TParams& p) {
    if (y.size() <= phi.degree() + vphi.degree()) {
        throw InvalidInput("loglik: series must be longer than r + s");
    }
    const Series causal = filter_causal(y, phi);
    const Series eps = filter_noncausal(causal, vphi);
    return loglik_residuals(eps, p);
}

StudentTSampler::StudentTSampler(const TParams& p, std::uint64_t seed)
    : params_(validated(p)), rng_(seed), normal_(0.0, 1.0), gamma_(0.5 * p.nu, 2.0) {}

double StudentTSampler::operator()() {
    const double z = normal_(rng_);
    const double g = gamma_(rng_);
    return params_.eta * z / std::sqrt(g / params_.nu);
}

Series sample(std::size_t n, const TParams& p, std::uint64_t seed) {
    if (n == 0) throw InvalidInput("sample: n must be at least 1");
    StudentTSampler draw(p, seed);
    Series out(n);
    for (auto& x : out) x = draw();
    return out;
}

double fisher_J(double nu) {
    if (!(nu > 2.0)) {
        throw InfiniteVarianceError("information constant J requires nu > 2 (error variance is infinite)");
    }
    return nu * (nu + 1.0) / ((nu - 2.0) * (nu + 3.0));
}

double fisher_J_tilde(const TParams& p) {
    p.validate();
    return (p.nu + 1.0) / ((p.nu + 3.0) * p.eta * p.eta);
}

double error_variance(const TParams& p) {
    p.validate();
    if (p.nu <= 2.0) return std::numeric_limits<double>::infinity();
    return p.eta * p.eta * p.nu / (p.nu - 2.0);
}

}  // namespace mixar
