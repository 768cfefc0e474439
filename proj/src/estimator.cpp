#include "mixar/estimator.hpp"

#include "mixar/robustscale.hpp"
#include "mixar/rng.hpp"
#include "mixar/simplex.hpp"
#include "mixar/simulator.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <string>

namespace mixar {

namespace {

double mean_of(std::span<const double> y) {
    return std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
}

Series demeaned(std::span<const double> y) {
    const double m = mean_of(y);
    Series out(y.begin(), y.end());
    for (auto& v : out) v -= m;
    return out;
}

/// Expands prod_i (1 - lambda_i z) into the coefficients c of 1 - c1 z - ... .
std::vector<double> coeffs_from_inverse_roots(const std::vector<std::complex<double>>& lambdas) {
    std::vector<std::complex<double>> poly{1.0};
    for (const auto& l : lambdas) {
        std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
        for (std::size_t k = 0; k < poly.size(); ++k) {
            next[k] += poly[k];
            next[k + 1] -= l * poly[k];
        }
        poly = std::move(next);
    }
    std::vector<double> c(lambdas.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = -poly[k + 1].real();
    return c;
}

/// Packs a model into optimizer coordinates (phi, vphi, log nu, log eta).
std::vector<double> pack(const MarModel& m) {
    std::vector<double> x(m.phi);
    x.insert(x.end(), m.vphi.begin(), m.vphi.end());
    x.push_back(std::log(m.dist.nu));
    x.push_back(std::log(m.dist.eta));
    return x;
}

MarModel unpack(std::span<const double> x, std::size_t r, std::size_t s) {
    MarModel m;
    m.phi.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(r));
    m.vphi.assign(x.begin() + static_cast<std::ptrdiff_t>(r),
                  x.begin() + static_cast<std::ptrdiff_t>(r + s));
    m.dist.nu = std::exp(x[r + s]);
    m.dist.eta = std::exp(x[r + s + 1]);
    return m;
}

bool stationary_fast(std::span<const double> c) {
    if (c.empty()) return true;
    if (c.size() == 1) return std::abs(c[0]) < 1.0 / (1.0 + kUnitCircleMargin);
    return is_stationary(LagPolynomial(std::vector<double>(c.begin(), c.end())));
}

/// Negative log-likelihood in optimizer coordinates with a reusable buffer.
class Objective {
public:
    Objective(std::span<const double> y, std::size_t r, std::size_t s)
        : y_(y), r_(r), s_(s), causal_(y.size() - r), eps_(y.size() - r - s) {}

    double operator()(std::span<const double> x) {
        const double log_nu = x[r_ + s_];
        if (!(log_nu >= log_nu_min_ && log_nu <= log_nu_max_)) return kInf;
        if (!std::isfinite(x[r_ + s_ + 1])) return kInf;
        const auto phi = x.subspan(0, r_);
        const auto vphi = x.subspan(r_, s_);
        if (!stationary_fast(phi) || !stationary_fast(vphi)) return kInf;

        for (std::size_t t = r_; t < y_.size(); ++t) {
            double v = y_[t];
            for (std::size_t i = 1; i <= r_; ++i) v -= phi[i - 1] * y_[t - i];
            causal_[t - r_] = v;
        }
        for (std::size_t t = 0; t < eps_.size(); ++t) {
            double v = causal_[t];
            for (std::size_t j = 1; j <= s_; ++j) v -= vphi[j - 1] * causal_[t + j];
            eps_[t] = v;
        }
        const TParams p{std::exp(log_nu), std::exp(x[r_ + s_ + 1])};
        const double ll = loglik_residuals(eps_, p);
        return std::isfinite(ll) ? -ll : kInf;
    }

private:
    static constexpr double kInf = std::numeric_limits<double>::infinity();
    std::span<const double> y_;
    std::size_t r_, s_;
    double log_nu_min_ = std::log(kNuLowerBound);
    double log_nu_max_ = std::log(kNuUpperBound);
    Series causal_;
    Series eps_;
};

std::vector<MarModel> start_points(std::span<const double> y, std::size_t r, std::size_t s,
                                   const FitOptions& opts) {
    const std::size_t p = r + s;
    std::vector<std::complex<double>> lambdas;
    Series ols_resid(y.begin(), y.end());
    if (p > 0 && y.size() > 2 * p + 1) {
        const OlsFit ols = fit_ar_ols(y, p);
        ols_resid = ols.residuals;
        lambdas = inverse_roots(LagPolynomial(ols.coeffs));
        for (auto& l : lambdas) {
            if (std::abs(l) > 0.95) l *= 0.95 / std::abs(l);
        }
        std::stable_sort(lambdas.begin(), lambdas.end(),
                         [](auto a, auto b) { return std::abs(a) > std::abs(b); });
    }

    double eta = 1.4826 * mad(ols_resid);
    if (!(eta > 0.0) || !std::isfinite(eta)) eta = 1.0;
    const TParams dist{opts.nu_start, eta};

    auto make = [&](std::vector<std::complex<double>> causal_roots,
                    std::vector<std::complex<double>> noncausal_roots) {
        MarModel m;
        m.dist = dist;
        m.phi = coeffs_from_inverse_roots(causal_roots);
        m.vphi = coeffs_from_inverse_roots(noncausal_roots);
        if (!stationary_fast(m.phi)) m.phi.assign(r, 0.0);
        if (!stationary_fast(m.vphi)) m.vphi.assign(s, 0.0);
        return m;
    };

    std::vector<MarModel> starts;
    if (lambdas.size() == p) {
        // largest inverse roots to the causal side, then to the noncausal side
        starts.push_back(make({lambdas.begin(), lambdas.begin() + static_cast<std::ptrdiff_t>(r)},
                              {lambdas.begin() + static_cast<std::ptrdiff_t>(r), lambdas.end()}));
        starts.push_back(make({lambdas.begin() + static_cast<std::ptrdiff_t>(s), lambdas.end()},
                              {lambdas.begin(), lambdas.begin() + static_cast<std::ptrdiff_t>(s)}));
    } else {
        MarModel m;
        m.dist = dist;
        m.phi.assign(r, 0.0);
        m.vphi.assign(s, 0.0);
        starts.push_back(m);
    }

    Rng rng(derive_seed(opts.seed, r * 1000 + s));
    std::normal_distribution<double> noise(0.0, 1.0);
    const MarModel base = starts.front();
    for (int k = 0; k < opts.n_random_starts; ++k) {
        MarModel m = base;
        for (int attempt = 0; attempt < 20; ++attempt) {
            MarModel trial = base;
            for (auto& c : trial.phi) c += 0.15 * noise(rng);
            for (auto& c : trial.vphi) c += 0.15 * noise(rng);
            if (stationary_fast(trial.phi) && stationary_fast(trial.vphi)) {
                m = trial;
                break;
            }
        }
        m.dist.nu = std::clamp(base.dist.nu * std::exp(0.3 * noise(rng)), 0.8, 50.0);
        m.dist.eta = base.dist.eta * std::exp(0.2 * noise(rng));
        starts.push_back(m);
    }

    for (const auto& extra : opts.extra_starts) {
        if (extra.r() == r && extra.s() == s && extra.valid() && extra.dist.nu >= kNuLowerBound &&
            extra.dist.nu <= kNuUpperBound) {
            starts.push_back(extra);
        }
    }

    // drop duplicates (e.g. both root splits coincide when r or s is zero)
    std::vector<MarModel> unique;
    for (auto& m : starts) {
        const bool seen = std::any_of(unique.begin(), unique.end(), [&](const MarModel& u) {
            return u.phi == m.phi && u.vphi == m.vphi && u.dist.nu == m.dist.nu &&
                   u.dist.eta == m.dist.eta;
        });
        if (!seen) unique.push_back(std::move(m));
    }
    return unique;
}

}  // namespace

OlsFit fit_ar_ols(std::span<const double> y, std::size_t p, std::size_t first) {
    if (y.size() <= 2 * p + 1) {
        throw InvalidInput("fit_ar_ols: need more than 2p + 1 observations");
    }
    const Series x = demeaned(y);
    const std::size_t start = std::max(p, first);
    if (start >= x.size()) throw InvalidInput("fit_ar_ols: empty regression sample");
    const std::size_t n = x.size() - start;

    OlsFit out;
    out.n_eff = n;
    Eigen::VectorXd target(static_cast<Eigen::Index>(n));
    for (std::size_t t = start; t < x.size(); ++t) target(static_cast<Eigen::Index>(t - start)) = x[t];

    Eigen::VectorXd resid = target;
    if (p > 0) {
        Eigen::MatrixXd design(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
        for (std::size_t t = start; t < x.size(); ++t) {
            for (std::size_t i = 1; i <= p; ++i) {
                design(static_cast<Eigen::Index>(t - start), static_cast<Eigen::Index>(i - 1)) =
                    x[t - i];
            }
        }
        const Eigen::VectorXd beta = design.colPivHouseholderQr().solve(target);
        resid = target - design * beta;
        out.coeffs.assign(beta.data(), beta.data() + beta.size());
    }
    out.residuals.assign(resid.data(), resid.data() + resid.size());
    out.sigma2 = resid.squaredNorm() / static_cast<double>(n);

    const double nd = static_cast<double>(n);
    const double neg2ll = nd * (std::log(2.0 * std::numbers::pi * out.sigma2) + 1.0);
    out.aic = neg2ll + 2.0 * static_cast<double>(p);
    out.bic = neg2ll + std::log(nd) * static_cast<double>(p);
    return out;
}

std::size_t select_p(std::span<const double> y, std::size_t p_max, InfoCriterion criterion) {
    if (p_max < 1) throw InvalidInput("select_p: p_max must be at least 1");
    std::size_t best_p = 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t p = 1; p <= p_max; ++p) {
        const OlsFit fit = fit_ar_ols(y, p, p_max);
        const double value = criterion == InfoCriterion::aic ? fit.aic : fit.bic;
        if (value < best) {
            best = value;
            best_p = p;
        }
    }
    return best_p;
}

Series centered(std::span<const double> y, const FitResult& fit) {
    Series out(y.begin(), y.end());
    for (auto& v : out) v -= fit.mean;
    return out;
}

FitResult fit_mar(std::span<const double> y_in, std::size_t r, std::size_t s,
                  const FitOptions& opts) {
    if (y_in.size() <= r + s + 2) throw InvalidInput("fit_mar: need more than r + s + 2 observations");
    for (double v : y_in) {
        if (!std::isfinite(v)) throw InvalidInput("fit_mar: series contains a non-finite value");
    }

    FitResult result;
    result.T = y_in.size();
    result.mean = opts.demean ? mean_of(y_in) : 0.0;
    const Series y = centered(y_in, result);

    Objective objective(y, r, s);
    auto f = [&objective](std::span<const double> x) { return objective(x); };

    SimplexOptions simplex;
    simplex.xtol = opts.xtol;
    simplex.max_evaluations = opts.max_evaluations;

    const auto starts = start_points(y, r, s, opts);
    SimplexResult best;
    best.fx = std::numeric_limits<double>::infinity();
    bool any_converged = false;
    for (const auto& start : starts) {
        SimplexResult run = nelder_mead(f, pack(start), simplex);
        any_converged = any_converged || run.converged;
        if (run.fx < best.fx || best.x.empty()) best = std::move(run);
    }
    result.n_starts_used = static_cast<int>(starts.size());

    if (std::isfinite(best.fx)) {
        simplex.initial_step = 0.02;
        SimplexResult polish = nelder_mead(f, best.x, simplex);
        if (polish.fx <= best.fx) {
            best = std::move(polish);
        }
        any_converged = any_converged || best.converged;
    }

    if (!best.x.empty()) {
        result.model = unpack(best.x, r, s);
        result.loglik = -best.fx;
        result.converged = best.converged;
        if (std::isfinite(best.fx)) result.residuals = residuals(y, result.model);
    }
    if (!std::isfinite(best.fx) || !any_converged) {
        throw NonConvergenceError("fit_mar: no start converged", std::move(result));
    }
    return result;
}

RsSelection select_rs(std::span<const double> y, std::size_t p, const FitOptions& opts) {
    RsSelection out;
    out.logliks.assign(p + 1, -std::numeric_limits<double>::infinity());
    bool have = false;
    std::optional<NonConvergenceError> last_failure;
    for (std::size_t r = p + 1; r-- > 0;) {
        FitResult fit;
        try {
            fit = fit_mar(y, r, p - r, opts);
        } catch (const NonConvergenceError& e) {
            last_failure = e;
            continue;
        }
        out.logliks[r] = fit.loglik;
        if (!have || fit.loglik > out.fit.loglik) {
            out.r = r;
            out.s = p - r;
            out.fit = std::move(fit);
            have = true;
        }
    }
    if (!have) throw *last_failure;
    return out;
}

}  // namespace mixar
