#pragma once

#include "mixar/estimator.hpp"
#include "mixar/model.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mixar {

/**
 * @brief Covariances of the unit-innovation AR processes u*, v*.
 *
 * phi(L) u*_t = zeta_t and varphi(L) v*_t = zeta_t share the same zeta with
 * unit variance. gamma_u = Cov(U*_{t-1}), gamma_v = Cov(V*_{t-1}) and
 * gamma_uv = Cov(U*_{t-1}, V*_{t-1}); the transpose of gamma_uv is the
 * (V*, U*) block.
 */
struct GammaBlocks {
    Eigen::MatrixXd gamma_u;
    Eigen::MatrixXd gamma_v;
    Eigen::MatrixXd gamma_uv;
    std::size_t truncation = 0;  ///< number of MA weights summed
};

GammaBlocks gamma_blocks(const LagPolynomial& phi, const LagPolynomial& vphi, double tol = 1e-15,
                         std::size_t max_terms = 100000);

/**
 * Classical information matrix of (phi, varphi):
 * [[J gamma_u, gamma_uv], [gamma_uv', J gamma_v]] with J = fisher_J(nu).
 * Throws InfiniteVarianceError when nu <= 2.
 */
Eigen::MatrixXd sigma_classic(const MarModel& model, const GammaBlocks& blocks);

/// Information matrix that may be unavailable; `reason` says why.
struct InfoMatrix {
    Eigen::MatrixXd matrix;
    bool degenerate = false;
    std::string reason;
};

/**
 * Block-diagonal observed information: the (phi, phi) block of the negative
 * Hessian of the log-likelihood with varphi, nu, eta held at the estimate, and
 * likewise for varphi; each divided by T - p. Central differences with step
 * `step * max(1, |theta_i|)`. A block that is not positive definite marks the
 * result degenerate.
 */
InfoMatrix sigma_block_hessian(std::span<const double> y, const FitResult& fit, double step = 1e-4);

/**
 * Robust information matrix: diagonal blocks sigma_hat^2 J~(nu_hat, eta_hat) gamma,
 * off-diagonal gamma_uv unscaled, with sigma_hat = kstar * MAD(residuals).
 * Throws DegenerateError when the residual MAD is zero.
 */
Eigen::MatrixXd sigma_robust(const FitResult& fit, double kstar, const GammaBlocks& blocks);

/// sqrt(diag(info^-1) / (T - p)). Throws NumericalError if info is singular.
Eigen::VectorXd standard_errors(const Eigen::MatrixXd& info, std::size_t T, std::size_t p);

struct OmegaStandardErrors {
    double se_nu = 0.0;
    double se_eta = 0.0;
    Eigen::Matrix2d omega;  ///< -Hessian in (nu, eta) divided by T - p
};

/// Standard errors of (nu, eta) from the observed distributional information.
/// Throws DegenerateError if that information is not positive definite.
OmegaStandardErrors omega_standard_errors(std::span<const double> y, const FitResult& fit,
                                          double step = 1e-4);

struct TTest {
    double stat = 0.0;
    bool reject = false;
};

/// stat = (estimate - null) / se; reject iff |stat| > critical.
TTest t_test(double estimate, double null_value, double se, double critical = 1.96);

/// Two-sided standard normal critical value for the given level.
double critical_value(double level);

/// Central-difference Hessian of f at x; step_i = step * max(1, |x_i|).
Eigen::MatrixXd numerical_hessian(const std::function<double(std::span<const double>)>& f,
                                  std::span<const double> x, double step);

enum class SeMethod { classic, block_hessian, robust };

const char* to_string(SeMethod m);
SeMethod se_method_from_string(const std::string& name);

struct SeReport {
    SeMethod method = SeMethod::classic;
    std::vector<double> se_phi;
    std::vector<double> se_vphi;
    double se_nu = 0.0;
    double se_eta = 0.0;
    Eigen::MatrixXd info_matrix;
};

/// Everything needed to build SE reports for one fit.
struct SeInputs {
    std::span<const double> y;  ///< series as passed to fit_mar
    const FitResult* fit = nullptr;
    std::optional<double> kstar;  ///< required for the robust method
    double step = 1e-4;
};

/// Result for one method: either a report or the reason it is unavailable.
struct SeOutcome {
    std::optional<SeReport> report;
    std::string unavailable_reason;
};

/// Builds the SE report for `method`; never throws for numerical unavailability.
SeOutcome compute_se(SeMethod method, const SeInputs& in, const GammaBlocks& blocks,
                     const std::optional<OmegaStandardErrors>& omega);

}  // namespace mixar
