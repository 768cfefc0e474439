#include "mixar/lagpoly.hpp"

#include "mixar/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace mixar {

namespace {

void require_finite(const LagPolynomial& poly) {
    for (double c : poly.coeffs()) {
        if (!std::isfinite(c)) throw InvalidInput("lag polynomial has a non-finite coefficient");
    }
}

void require_length(std::span<const double> y, const LagPolynomial& poly) {
    if (y.size() <= poly.degree()) {
        throw InvalidInput("series of length " + std::to_string(y.size()) +
                           " is too short for a polynomial of degree " +
                           std::to_string(poly.degree()));
    }
}

}  // namespace

std::vector<std::complex<double>> inverse_roots(const LagPolynomial& poly) {
    require_finite(poly);
    const auto d = static_cast<Eigen::Index>(poly.degree());
    if (d == 0) return {};
    if (d == 1) return {std::complex<double>(poly[0], 0.0)};

    // lambda^d - c1 lambda^{d-1} - ... - cd = 0
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(d, d);
    for (Eigen::Index j = 0; j < d; ++j) companion(0, j) = poly[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 1; i < d; ++i) companion(i, i - 1) = 1.0;

    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    if (solver.info() != Eigen::Success) throw NumericalError("companion eigenvalue solve failed");
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

bool is_stationary(const LagPolynomial& poly) {
    const double max_inverse = 1.0 / (1.0 + kUnitCircleMargin);
    for (const auto& lambda : inverse_roots(poly)) {
        if (std::abs(lambda) >= max_inverse) return false;
    }
    return true;
}

MaWeights ma_weights(const LagPolynomial& poly, double tol, std::size_t max_terms) {
    if (!(tol > 0.0)) throw InvalidInput("ma_weights: tol must be positive");
    if (!is_stationary(poly)) throw DomainError("ma_weights: polynomial is not stationary");

    MaWeights out;
    out.psi.push_back(1.0);
    const std::size_t d = poly.degree();
    if (d == 0) return out;

    const std::size_t window = std::max<std::size_t>(d, 1);
    std::size_t small_run = 0;
    while (out.psi.size() <= max_terms) {
        const std::size_t j = out.psi.size();
        double next = 0.0;
        for (std::size_t i = 1; i <= std::min(d, j); ++i) next += poly[i - 1] * out.psi[j - i];
        out.psi.push_back(next);
        small_run = std::abs(next) < tol ? small_run + 1 : 0;
        if (small_run >= window) break;
    }
    out.tail_bound = std::abs(out.psi.back());
    out.truncated = out.tail_bound >= tol;
    return out;
}

Series filter_causal(std::span<const double> y, const LagPolynomial& poly) {
    require_length(y, poly);
    const std::size_t d = poly.degree();
    Series z(y.size() - d);
    for (std::size_t t = d; t < y.size(); ++t) {
        double v = y[t];
        for (std::size_t i = 1; i <= d; ++i) v -= poly[i - 1] * y[t - i];
        z[t - d] = v;
    }
    return z;
}

Series filter_noncausal(std::span<const double> y, const LagPolynomial& poly) {
    require_length(y, poly);
    const std::size_t d = poly.degree();
    Series z(y.size() - d);
    for (std::size_t t = 0; t + d < y.size(); ++t) {
        double v = y[t];
        for (std::size_t i = 1; i <= d; ++i) v -= poly[i - 1] * y[t + i];
        z[t] = v;
    }
    return z;
}

}  // namespace mixar
