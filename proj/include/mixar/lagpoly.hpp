#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace mixar {

using Series = std::vector<double>;

/// Roots with modulus <= 1 + kUnitCircleMargin count as non-stationary.
inline constexpr double kUnitCircleMargin = 1e-8;

/**
 * @brief Lag (or lead) polynomial 1 - c1 z - c2 z^2 - ... - cd z^d.
 *
 * The same type stores the causal polynomial phi(L) and the noncausal
 * polynomial varphi(L^-1); only the filter direction differs. A polynomial
 * with no coefficients is the identity.
 */
class LagPolynomial {
public:
    LagPolynomial() = default;
    explicit LagPolynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {}

    std::size_t degree() const noexcept { return coeffs_.size(); }
    bool is_identity() const noexcept { return coeffs_.empty(); }

    /// c_{i+1}, zero based.
    double operator[](std::size_t i) const { return coeffs_[i]; }
    std::span<const double> coeffs() const noexcept { return coeffs_; }

    friend bool operator==(const LagPolynomial&, const LagPolynomial&) = default;

private:
    std::vector<double> coeffs_;
};

/// Eigenvalues of the companion matrix, i.e. the reciprocals of the roots.
std::vector<std::complex<double>> inverse_roots(const LagPolynomial& poly);

/**
 * True iff every root of 1 - c1 z - ... - cd z^d lies strictly outside the
 * unit circle (modulus > 1 + kUnitCircleMargin). Throws InvalidInput on a
 * non-finite coefficient.
 */
bool is_stationary(const LagPolynomial& poly);

struct MaWeights {
    std::vector<double> psi;  ///< psi_0 = 1, psi_1, ..., psi_M
    double tail_bound = 0.0;  ///< |psi_M|
    bool truncated = false;   ///< stopped at max_terms before reaching tol
};

/**
 * @brief MA(infinity) weights of 1 / poly(z).
 *
 * psi_j = sum_i c_i psi_{j-i}. The expansion stops once the last max(d, 1)
 * weights are all below `tol` in magnitude, so oscillating expansions with an
 * isolated zero weight are not cut short. Hitting `max_terms` first sets
 * `truncated`.
 *
 * @throws DomainError if the polynomial is not stationary.
 */
MaWeights ma_weights(const LagPolynomial& poly, double tol = 1e-12,
                     std::size_t max_terms = 100000);

/// z_t = y_t - sum_i c_i y_{t-i} for t = d+1..T (length T - d).
Series filter_causal(std::span<const double> y, const LagPolynomial& poly);

/// z_t = y_t - sum_i c_i y_{t+i} for t = 1..T-d (length T - d).
Series filter_noncausal(std::span<const double> y, const LagPolynomial& poly);

}  // namespace mixar
