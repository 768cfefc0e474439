#include "mixar/harness.hpp"

#include "mixar/errors.hpp"
#include "mixar/parallel.hpp"
#include "mixar/rng.hpp"
#include "mixar/robustscale.hpp"
#include "mixar/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <string>

namespace mixar {

namespace {

struct MethodOutcome {
    bool ok = false;
    std::vector<char> reject_phi;
    std::vector<char> reject_vphi;
};

std::string join_percent(const std::vector<double>& v, const char* sep) {
    std::string out;
    char buf[32];
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * v[i]);
        if (i) out += sep;
        out += buf;
    }
    return out;
}

std::string join_fraction(const std::vector<double>& v) {
    std::string out;
    char buf[32];
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.6f", v[i]);
        if (i) out += ';';
        out += buf;
    }
    return out;
}

FitOptions replication_fit_options(const ErfConfig& cfg, std::uint64_t rep_seed) {
    FitOptions fo = cfg.fit;
    fo.seed = derive_seed(rep_seed, 1);
    if (cfg.start_at_truth) fo.extra_starts.push_back(cfg.dgp);
    return fo;
}

Series simulate_replication(const ErfConfig& cfg, std::size_t T, std::uint64_t rep_seed) {
    SimConfig sim;
    sim.T = T;
    sim.model = cfg.dgp;
    sim.burn = cfg.burn;
    sim.seed = derive_seed(rep_seed, 0);
    return simulate_mar(sim);
}

constexpr std::uint64_t kCalibrationStream = 0xca1bULL << 32;

}  // namespace

void ErfConfig::validate(std::size_t min_replications) const {
    if (!(nominal_level > 0.0 && nominal_level <= 1.0)) {
        throw InvalidInput("nominal_level must be in (0, 1]");
    }
    if (N < min_replications) {
        throw InvalidInput("need at least " + std::to_string(min_replications) + " replications");
    }
    if (T_grid.empty()) throw InvalidInput("T grid is empty");
    for (std::size_t T : T_grid) {
        if (T <= dgp.p() + 2) throw InvalidInput("T grid value too small for the model order");
    }
    if (!dgp.valid()) throw DomainError("DGP must have stationary polynomials and positive nu, eta");
}

double cell_kstar(const ErfConfig& cfg, double nu, std::size_t T, std::uint64_t seed) {
    if (cfg.kstar_source == KStarSource::reference) return kstar_reference(nu, T);
    return calibrate_kstar(nu, T, cfg.kstar_N, seed, cfg.threads).kstar;
}

std::vector<ErfRow> run_erf(const ErfConfig& cfg) {
    cfg.validate(100);
    const double critical = critical_value(cfg.nominal_level);
    const std::size_t r = cfg.dgp.r();
    const std::size_t s = cfg.dgp.s();
    const std::size_t n_methods = cfg.methods.size();
    const bool wants_robust =
        std::find(cfg.methods.begin(), cfg.methods.end(), SeMethod::robust) != cfg.methods.end();

    std::vector<ErfRow> rows;
    for (std::size_t T : cfg.T_grid) {
        const std::uint64_t cell_seed = derive_seed(cfg.seed, T);
        double kstar = 0.0;
        if (wants_robust && !cfg.kstar_per_replication) {
            kstar = cell_kstar(cfg, cfg.dgp.dist.nu, T, derive_seed(cell_seed, kCalibrationStream));
        }

        std::vector<std::vector<MethodOutcome>> outcomes(cfg.N, std::vector<MethodOutcome>(n_methods));
        parallel_for(cfg.N, cfg.threads, [&](std::size_t rep) {
            const std::uint64_t rep_seed = derive_seed(cell_seed, rep);
            const Series y = simulate_replication(cfg, T, rep_seed);
            FitResult fit;
            GammaBlocks blocks;
            try {
                fit = fit_mar(y, r, s, replication_fit_options(cfg, rep_seed));
                blocks = gamma_blocks(fit.model.causal(), fit.model.noncausal());
            } catch (const std::exception&) {
                return;
            }
            SeInputs in;
            in.y = y;
            in.fit = &fit;
            if (wants_robust) {
                if (!cfg.kstar_per_replication) {
                    in.kstar = kstar;
                } else {
                    try {
                        in.kstar = calibrate_kstar(fit.model.dist.nu, T, cfg.kstar_N,
                                                   derive_seed(rep_seed, 2), 1)
                                       .kstar;
                    } catch (const std::exception&) {
                    }
                }
            }
            for (std::size_t m = 0; m < n_methods; ++m) {
                const SeMethod method = cfg.methods[m];
                if (method == SeMethod::classic && !(cfg.dgp.dist.nu > 2.0)) continue;
                const SeOutcome se = compute_se(method, in, blocks, std::nullopt);
                if (!se.report) continue;
                MethodOutcome& o = outcomes[rep][m];
                o.ok = true;
                for (std::size_t i = 0; i < r; ++i) {
                    o.reject_phi.push_back(
                        t_test(fit.model.phi[i], cfg.dgp.phi[i], se.report->se_phi[i], critical).reject);
                }
                for (std::size_t j = 0; j < s; ++j) {
                    o.reject_vphi.push_back(
                        t_test(fit.model.vphi[j], cfg.dgp.vphi[j], se.report->se_vphi[j], critical).reject);
                }
            }
        });

        for (std::size_t m = 0; m < n_methods; ++m) {
            ErfRow row;
            row.T = T;
            row.method = cfg.methods[m];
            row.kstar = row.method == SeMethod::robust ? kstar : 0.0;
            if (row.method == SeMethod::classic && !(cfg.dgp.dist.nu > 2.0)) {
                row.defined = false;
                rows.push_back(std::move(row));
                continue;
            }
            std::vector<double> hits_phi(r, 0.0), hits_vphi(s, 0.0);
            for (const auto& rep : outcomes) {
                const MethodOutcome& o = rep[m];
                if (!o.ok) {
                    ++row.n_failed_fits;
                    continue;
                }
                ++row.n_used;
                for (std::size_t i = 0; i < r; ++i) hits_phi[i] += o.reject_phi[i];
                for (std::size_t j = 0; j < s; ++j) hits_vphi[j] += o.reject_vphi[j];
            }
            const double denom = row.n_used > 0 ? static_cast<double>(row.n_used)
                                                : std::numeric_limits<double>::quiet_NaN();
            for (double h : hits_phi) row.erf_phi.push_back(h / denom);
            for (double h : hits_vphi) row.erf_vphi.push_back(h / denom);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<SdGrowthRow> run_sd_growth(const ErfConfig& cfg) {
    cfg.validate(1);
    std::vector<SdGrowthRow> rows;
    for (std::size_t T : cfg.T_grid) {
        const std::uint64_t cell_seed = derive_seed(cfg.seed, T);
        SdGrowthRow row;
        row.T = T;
        row.kstar = cell_kstar(cfg, cfg.dgp.dist.nu, T, derive_seed(cell_seed, kCalibrationStream));

        std::vector<double> sigma(cfg.N, std::numeric_limits<double>::quiet_NaN());
        parallel_for(cfg.N, cfg.threads, [&](std::size_t rep) {
            const std::uint64_t rep_seed = derive_seed(cell_seed, rep);
            const Series y = simulate_replication(cfg, T, rep_seed);
            try {
                const FitResult fit =
                    fit_mar(y, cfg.dgp.r(), cfg.dgp.s(), replication_fit_options(cfg, rep_seed));
                sigma[rep] = row.kstar * mad(fit.residuals);
            } catch (const std::exception&) {
            }
        });

        std::vector<double> ok;
        for (double v : sigma) {
            if (std::isfinite(v)) ok.push_back(v);
        }
        row.n_used = ok.size();
        row.n_failed_fits = cfg.N - ok.size();
        if (!ok.empty()) {
            std::sort(ok.begin(), ok.end());
            row.min = ok.front();
            row.q1 = quantile_sorted(ok, 0.25);
            row.median = quantile_sorted(ok, 0.5);
            row.q3 = quantile_sorted(ok, 0.75);
            row.max = ok.back();
        }
        rows.push_back(row);
    }
    return rows;
}

void write_erf_csv(std::ostream& os, const std::vector<ErfRow>& rows) {
    os << "T,method,erf_phi,erf_vphi,n_used,n_failed,kstar\n";
    char buf[32];
    for (const auto& row : rows) {
        os << row.T << ',' << to_string(row.method) << ',';
        if (!row.defined) {
            os << "/,/," << row.n_used << ',' << row.n_failed_fits << ",\n";
            continue;
        }
        std::snprintf(buf, sizeof buf, "%.6f", row.kstar);
        os << join_fraction(row.erf_phi) << ',' << join_fraction(row.erf_vphi) << ',' << row.n_used
           << ',' << row.n_failed_fits << ',' << (row.method == SeMethod::robust ? buf : "") << '\n';
    }
}

void write_erf_table(std::ostream& os, const std::vector<ErfRow>& rows) {
    std::vector<SeMethod> methods;
    std::map<std::size_t, std::map<SeMethod, const ErfRow*>> by_T;
    for (const auto& row : rows) {
        if (std::find(methods.begin(), methods.end(), row.method) == methods.end()) {
            methods.push_back(row.method);
        }
        by_T[row.T][row.method] = &row;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-8s", "T");
    os << buf;
    for (SeMethod m : methods) {
        std::snprintf(buf, sizeof buf, " | %-24s", to_string(m));
        os << buf;
    }
    os << '\n';
    for (const auto& [T, cells] : by_T) {
        std::snprintf(buf, sizeof buf, "T=%-6zu", T);
        os << buf;
        for (SeMethod m : methods) {
            const auto it = cells.find(m);
            std::string cell = "-";
            if (it != cells.end()) {
                const ErfRow& row = *it->second;
                cell = row.defined ? join_percent(row.erf_phi, " ") + "  " + join_percent(row.erf_vphi, " ")
                                   : std::string("/  /");
            }
            std::snprintf(buf, sizeof buf, " | %-24s", cell.c_str());
            os << buf;
        }
        os << '\n';
    }
}

void write_sd_growth_csv(std::ostream& os, const std::vector<SdGrowthRow>& rows) {
    os << "T,min,q1,median,q3,max,n_used,n_failed,kstar\n";
    char buf[256];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%zu,%.6f,%.6f,%.6f,%.6f,%.6f,%zu,%zu,%.6f\n", row.T, row.min,
                      row.q1, row.median, row.q3, row.max, row.n_used, row.n_failed_fits, row.kstar);
        os << buf;
    }
}

}  // namespace mixar
