#pragma once

#include "mixar/errors.hpp"
#include "mixar/model.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mixar {

/// Search bounds for nu; points outside are rejected by the optimizer.
inline constexpr double kNuLowerBound = 0.55;
inline constexpr double kNuUpperBound = 100.0;

struct OlsFit {
    std::vector<double> coeffs;
    double sigma2 = 0.0;  ///< RSS / n_eff (Gaussian MLE)
    double aic = 0.0;
    double bic = 0.0;
    std::size_t n_eff = 0;
    Series residuals;
};

enum class InfoCriterion { aic, bic };

/**
 * Least-squares AR(p) on the demeaned series. Regressions run over
 * t = max(p, first)..T-1 (zero based) so several orders can share one sample.
 * Requires length > 2p + 1.
 */
OlsFit fit_ar_ols(std::span<const double> y, std::size_t p, std::size_t first = 0);

/// argmin of the criterion over p = 1..p_max on a common sample; ties go to
/// the smaller order.
std::size_t select_p(std::span<const double> y, std::size_t p_max,
                     InfoCriterion criterion = InfoCriterion::bic);

struct FitOptions {
    bool demean = true;
    int n_random_starts = 4;
    std::uint64_t seed = 0;
    double xtol = 1e-8;
    int max_evaluations = 20000;
    double nu_start = 2.5;
    /// Additional start points; ignored unless their (r, s) match the fit.
    std::vector<MarModel> extra_starts;
};

struct FitResult {
    MarModel model;
    double loglik = 0.0;
    Series residuals;        ///< length T - r - s
    std::size_t T = 0;       ///< length of the input series
    double mean = 0.0;       ///< value removed before fitting (0 if not demeaned)
    bool converged = false;
    int n_starts_used = 0;
};

/// Thrown when no start reaches the simplex tolerance; carries the best point.
class NonConvergenceError : public NumericalError {
public:
    NonConvergenceError(const std::string& what, FitResult best)
        : NumericalError(what), best_(std::move(best)) {}
    const FitResult& best() const noexcept { return best_; }

private:
    FitResult best_;
};

/// The series the likelihood is evaluated on: y minus fit.mean.
Series centered(std::span<const double> y, const FitResult& fit);

/**
 * @brief Approximate ML fit of a MAR(r,s) model.
 *
 * Maximizes the t likelihood over (phi, varphi, log nu, log eta) with a
 * multi-start Nelder-Mead search. Starts: the OLS AR(r+s) inverse roots split
 * both ways between the causal and noncausal sides, `n_random_starts`
 * perturbations of the first, and any `extra_starts`. The best run is polished
 * by one restart. Nonstationary candidates and nu outside
 * [kNuLowerBound, kNuUpperBound] are rejected.
 */
FitResult fit_mar(std::span<const double> y, std::size_t r, std::size_t s,
                  const FitOptions& opts = {});

struct RsSelection {
    std::size_t r = 0;
    std::size_t s = 0;
    FitResult fit;
    std::vector<double> logliks;  ///< indexed by r, for r + s = p
};

/// Fits every split r + s = p and keeps the highest likelihood; ties go to larger r.
RsSelection select_rs(std::span<const double> y, std::size_t p, const FitOptions& opts = {});

}  // namespace mixar
