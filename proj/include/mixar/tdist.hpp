#pragma once

#include "mixar/lagpoly.hpp"
#include "mixar/rng.hpp"

#include <cstdint>
#include <random>
#include <span>

namespace mixar {

/// Generalized Student's t: degrees of freedom nu and scale eta, both > 0.
struct TParams {
    double nu = 1.0;
    double eta = 1.0;

    /// Throws DomainError unless nu > 0 and eta > 0 (and both finite).
    void validate() const;
};

/// Log density of eps under t(nu) scaled by eta. Computed with lgamma only.
double log_density(double eps, const TParams& p);

/**
 * @brief Approximate log-likelihood of a MAR(r,s) sample.
 *
 * eps_t = phi(L) varphi(L^-1) y_t for t = r+1..T-s. The normalizing constant
 * is multiplied by T - p with p = r + s, which is exactly the number of
 * summed residuals (the first r and last s observations are dropped).
 */
double loglik(std::span<const double> y, const LagPolynomial& phi, const LagPolynomial& vphi,
              const TParams& p);

/// Same likelihood evaluated on residuals that are already filtered.
double loglik_residuals(std::span<const double> eps, const TParams& p);

/// Draws eta * Z / sqrt(G / nu), Z ~ N(0,1), G ~ Gamma(nu/2, scale 2).
class StudentTSampler {
public:
    StudentTSampler(const TParams& p, std::uint64_t seed);

    double operator()();

private:
    TParams params_;
    Rng rng_;
    std::normal_distribution<double> normal_;
    std::gamma_distribution<double> gamma_;
};

/// n i.i.d. draws, deterministic given seed.
Series sample(std::size_t n, const TParams& p, std::uint64_t seed);

/// nu (nu + 1) / ((nu - 2)(nu + 3)); throws InfiniteVarianceError for nu <= 2.
double fisher_J(double nu);

/// (nu + 1) / ((nu + 3) eta^2); finite for every nu > 0.
double fisher_J_tilde(const TParams& p);

/// eta^2 nu / (nu - 2), or +infinity when nu <= 2.
double error_variance(const TParams& p);

}  // namespace mixar
