#include "mixar/infer.hpp"

#include "mixar/errors.hpp"
#include "mixar/robustscale.hpp"
#include "mixar/tdist.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace mixar {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;

double lagged_product(const std::vector<double>& a, const std::vector<double>& b, std::size_t shift) {
    double sum = 0.0;
    for (std::size_t m = 0; m + shift < b.size() && m < a.size(); ++m) sum += a[m] * b[m + shift];
    return sum;
}

double effective_n(const FitResult& fit) {
    return static_cast<double>(fit.T - fit.model.p());
}

bool positive_definite(const MatrixXd& m) {
    if (m.size() == 0) return true;
    Eigen::LLT<MatrixXd> llt(m);
    return llt.info() == Eigen::Success;
}

/// [[scale * gamma_u, gamma_uv], [gamma_uv', scale * gamma_v]]
MatrixXd assemble(const GammaBlocks& b, double scale) {
    const Index r = b.gamma_u.rows();
    const Index s = b.gamma_v.rows();
    MatrixXd m(r + s, r + s);
    if (r > 0) m.topLeftCorner(r, r) = scale * b.gamma_u;
    if (s > 0) m.bottomRightCorner(s, s) = scale * b.gamma_v;
    if (r > 0 && s > 0) {
        m.topRightCorner(r, s) = b.gamma_uv;
        m.bottomLeftCorner(s, r) = b.gamma_uv.transpose();
    }
    return m;
}

}  // namespace

GammaBlocks gamma_blocks(const LagPolynomial& phi, const LagPolynomial& vphi, double tol,
                         std::size_t max_terms) {
    if (!is_stationary(phi) || !is_stationary(vphi)) {
        throw DomainError("gamma_blocks: polynomials must be stationary");
    }
    const auto psi = ma_weights(phi, tol, max_terms).psi;
    const auto kappa = ma_weights(vphi, tol, max_terms).psi;
    const auto r = static_cast<Index>(phi.degree());
    const auto s = static_cast<Index>(vphi.degree());

    GammaBlocks out;
    out.truncation = std::max(psi.size(), kappa.size());
    out.gamma_u.resize(r, r);
    out.gamma_v.resize(s, s);
    out.gamma_uv.resize(r, s);
    for (Index i = 0; i < r; ++i) {
        for (Index j = 0; j < r; ++j) {
            out.gamma_u(i, j) = lagged_product(psi, psi, static_cast<std::size_t>(std::abs(i - j)));
        }
    }
    for (Index i = 0; i < s; ++i) {
        for (Index j = 0; j < s; ++j) {
            out.gamma_v(i, j) = lagged_product(kappa, kappa, static_cast<std::size_t>(std::abs(i - j)));
        }
    }
    // Cov(u*_{t-i}, v*_{t-j}) = sum_m psi_m kappa_{m+i-j} for i >= j
    for (Index i = 0; i < r; ++i) {
        for (Index j = 0; j < s; ++j) {
            out.gamma_uv(i, j) = i >= j ? lagged_product(psi, kappa, static_cast<std::size_t>(i - j))
                                        : lagged_product(kappa, psi, static_cast<std::size_t>(j - i));
        }
    }
    return out;
}

MatrixXd sigma_classic(const MarModel& model, const GammaBlocks& blocks) {
    const double J = fisher_J(model.dist.nu);
    return assemble(blocks, J);
}

MatrixXd sigma_robust(const FitResult& fit, double kstar, const GammaBlocks& blocks) {
    if (!(kstar > 0.0)) throw InvalidInput("sigma_robust: kstar must be positive");
    if (fit.model.p() == 0) return MatrixXd(0, 0);
    if (fit.residuals.empty()) throw InvalidInput("sigma_robust: fit has no residuals");
    const double m = mad(fit.residuals);
    if (!(m > 0.0)) throw DegenerateError("sigma_robust: residual MAD is zero");
    const double sigma_hat = kstar * m;
    return assemble(blocks, sigma_hat * sigma_hat * fisher_J_tilde(fit.model.dist));
}

MatrixXd numerical_hessian(const std::function<double(std::span<const double>)>& f,
                           std::span<const double> x0, double step) {
    const std::size_t n = x0.size();
    std::vector<double> x(x0.begin(), x0.end());
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = step * std::max(1.0, std::abs(x0[i]));

    const double f0 = f(x);
    MatrixXd H(static_cast<Index>(n), static_cast<Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = x0[i] + h[i];
        const double fp = f(x);
        x[i] = x0[i] - h[i];
        const double fm = f(x);
        x[i] = x0[i];
        H(static_cast<Index>(i), static_cast<Index>(i)) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
        for (std::size_t j = 0; j < i; ++j) {
            auto eval = [&](double si, double sj) {
                x[i] = x0[i] + si * h[i];
                x[j] = x0[j] + sj * h[j];
                const double v = f(x);
                x[i] = x0[i];
                x[j] = x0[j];
                return v;
            };
            const double v = (eval(1, 1) - eval(1, -1) - eval(-1, 1) + eval(-1, -1)) / (4.0 * h[i] * h[j]);
            H(static_cast<Index>(i), static_cast<Index>(j)) = v;
            H(static_cast<Index>(j), static_cast<Index>(i)) = v;
        }
    }
    return H;
}

InfoMatrix sigma_block_hessian(std::span<const double> y_in, const FitResult& fit, double step) {
    const Series y = centered(y_in, fit);
    const MarModel& m = fit.model;
    const auto r = static_cast<Index>(m.r());
    const auto s = static_cast<Index>(m.s());
    const double n = effective_n(fit);

    InfoMatrix out;
    out.matrix = MatrixXd::Zero(r + s, r + s);
    const LagPolynomial phi_hat = m.causal();
    const LagPolynomial vphi_hat = m.noncausal();

    if (r > 0) {
        auto f = [&](std::span<const double> phi) {
            return loglik(y, LagPolynomial({phi.begin(), phi.end()}), vphi_hat, m.dist);
        };
        const MatrixXd block = -numerical_hessian(f, m.phi, step) / n;
        out.matrix.topLeftCorner(r, r) = block;
        if (!positive_definite(block)) {
            out.degenerate = true;
            out.reason = "causal block not positive definite";
        }
    }
    if (s > 0) {
        auto f = [&](std::span<const double> vphi) {
            return loglik(y, phi_hat, LagPolynomial({vphi.begin(), vphi.end()}), m.dist);
        };
        const MatrixXd block = -numerical_hessian(f, m.vphi, step) / n;
        out.matrix.bottomRightCorner(s, s) = block;
        if (!positive_definite(block)) {
            out.degenerate = true;
            out.reason = out.reason.empty() ? "noncausal block not positive definite"
                                            : "causal and noncausal blocks not positive definite";
        }
    }
    return out;
}

Eigen::VectorXd standard_errors(const MatrixXd& info, std::size_t T, std::size_t p) {
    if (info.rows() != info.cols()) throw InvalidInput("standard_errors: info must be square");
    if (T <= p) throw InvalidInput("standard_errors: T must exceed p");
    if (info.size() == 0) return Eigen::VectorXd(0);
    Eigen::FullPivLU<MatrixXd> lu(info);
    if (!lu.isInvertible()) throw NumericalError("standard_errors: information matrix is singular");
    const Eigen::VectorXd diag = lu.inverse().diagonal();
    Eigen::VectorXd se(diag.size());
    for (Index i = 0; i < diag.size(); ++i) {
        if (!(diag(i) > 0.0)) throw NumericalError("standard_errors: non-positive variance");
        se(i) = std::sqrt(diag(i) / static_cast<double>(T - p));
    }
    return se;
}

OmegaStandardErrors omega_standard_errors(std::span<const double> y_in, const FitResult& fit,
                                          double step) {
    const Series y = centered(y_in, fit);
    const LagPolynomial phi = fit.model.causal();
    const LagPolynomial vphi = fit.model.noncausal();
    auto f = [&](std::span<const double> theta) {
        if (!(theta[0] > 0.0) || !(theta[1] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        return loglik(y, phi, vphi, TParams{theta[0], theta[1]});
    };
    const std::vector<double> theta{fit.model.dist.nu, fit.model.dist.eta};
    OmegaStandardErrors out;
    out.omega = -numerical_hessian(f, theta, step) / effective_n(fit);
    if (!out.omega.allFinite() || !positive_definite(out.omega)) {
        throw DegenerateError("omega: distributional information is not positive definite");
    }
    const Eigen::VectorXd se = standard_errors(out.omega, fit.T, fit.model.p());
    out.se_nu = se(0);
    out.se_eta = se(1);
    return out;
}

TTest t_test(double estimate, double null_value, double se, double critical) {
    if (!(se > 0.0) || !std::isfinite(se)) throw InvalidInput("t_test: standard error must be positive");
    TTest out;
    out.stat = (estimate - null_value) / se;
    out.reject = std::abs(out.stat) > critical;
    return out;
}

double critical_value(double level) {
    if (!(level > 0.0 && level <= 1.0)) throw InvalidInput("critical_value: level must be in (0, 1]");
    const boost::math::normal_distribution<double> normal;
    return boost::math::quantile(normal, 1.0 - 0.5 * level);
}

const char* to_string(SeMethod m) {
    switch (m) {
        case SeMethod::classic: return "classic";
        case SeMethod::block_hessian: return "block_hessian";
        case SeMethod::robust: return "robust";
    }
    return "unknown";
}

SeMethod se_method_from_string(const std::string& name) {
    if (name == "classic") return SeMethod::classic;
    if (name == "block_hessian") return SeMethod::block_hessian;
    if (name == "robust") return SeMethod::robust;
    throw InvalidInput("unknown standard-error method '" + name + "'");
}

SeOutcome compute_se(SeMethod method, const SeInputs& in, const GammaBlocks& blocks,
                     const std::optional<OmegaStandardErrors>& omega) {
    SeOutcome out;
    const FitResult& fit = *in.fit;
    const std::size_t r = fit.model.r();
    SeReport report;
    report.method = method;
    report.se_nu = omega ? omega->se_nu : std::numeric_limits<double>::quiet_NaN();
    report.se_eta = omega ? omega->se_eta : std::numeric_limits<double>::quiet_NaN();

    try {
        switch (method) {
            case SeMethod::classic:
                if (!(fit.model.dist.nu > 2.0)) {
                    out.unavailable_reason = "nu<=2";
                    return out;
                }
                report.info_matrix = sigma_classic(fit.model, blocks);
                break;
            case SeMethod::block_hessian: {
                InfoMatrix info = sigma_block_hessian(in.y, fit, in.step);
                if (info.degenerate) {
                    out.unavailable_reason = info.reason;
                    return out;
                }
                report.info_matrix = std::move(info.matrix);
                break;
            }
            case SeMethod::robust:
                if (!in.kstar) {
                    out.unavailable_reason = "no k* available";
                    return out;
                }
                report.info_matrix = sigma_robust(fit, *in.kstar, blocks);
                break;
        }
        const Eigen::VectorXd se = standard_errors(report.info_matrix, fit.T, fit.model.p());
        report.se_phi.assign(se.data(), se.data() + r);
        report.se_vphi.assign(se.data() + r, se.data() + se.size());
    } catch (const std::exception& e) {
        out.unavailable_reason = e.what();
        return out;
    }
    out.report = std::move(report);
    return out;
}

}  // namespace mixar
