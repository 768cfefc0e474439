#pragma once

#include "mixar/estimator.hpp"
#include "mixar/infer.hpp"
#include "mixar/model.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace mixar {

/// Where the robust method gets k*(nu, T) for a cell.
enum class KStarSource {
    calibrate,  ///< Monte-Carlo calibration at the DGP's nu and T
    reference,  ///< embedded reference table (interpolated)
};

struct ErfConfig {
    MarModel dgp;
    std::size_t burn = 500;
    std::vector<std::size_t> T_grid{100, 200, 500, 1000};
    std::size_t N = 1000;
    double nominal_level = 0.05;
    std::vector<SeMethod> methods{SeMethod::classic, SeMethod::block_hessian, SeMethod::robust};
    std::uint64_t seed = 1;
    KStarSource kstar_source = KStarSource::calibrate;
    std::size_t kstar_N = 100000;
    /// Calibrate k* at each replication's nu_hat instead of once per cell.
    bool kstar_per_replication = false;
    /// Seed each fit with the true parameters in addition to the usual starts.
    bool start_at_truth = true;
    unsigned threads = 1;
    FitOptions fit;

    /// Throws InvalidInput if the level, grid or model is unusable.
    void validate(std::size_t min_replications) const;
};

struct ErfRow {
    std::size_t T = 0;
    SeMethod method = SeMethod::classic;
    bool defined = true;  ///< false when the method cannot exist for this DGP (classic, nu <= 2)
    std::vector<double> erf_phi;
    std::vector<double> erf_vphi;
    std::size_t n_failed_fits = 0;  ///< excluded from the ERF denominator
    std::size_t n_used = 0;
    double kstar = 0.0;  ///< cell k* for the robust method
};

/**
 * @brief Empirical rejection frequencies of H0: coefficient = true value.
 *
 * For each T and replication: simulate the DGP, fit at the true (r, s), build
 * each requested SE report and t-test every coefficient. Replications whose fit
 * or SE fails are counted per method and left out of that method's
 * denominator. Requires N >= 100.
 */
std::vector<ErfRow> run_erf(const ErfConfig& cfg);

struct SdGrowthRow {
    std::size_t T = 0;
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
    std::size_t n_used = 0;
    std::size_t n_failed_fits = 0;
    double kstar = 0.0;
};

/// Five-number summary of sigma_hat = k*(nu0, T) * MAD(fitted residuals) per T.
std::vector<SdGrowthRow> run_sd_growth(const ErfConfig& cfg);

/// Columns T,method,erf_phi,erf_vphi,n_used,n_failed,kstar; "/" marks undefined methods.
void write_erf_csv(std::ostream& os, const std::vector<ErfRow>& rows);

/// Percentages laid out one row per T with a phi/varphi pair per method.
void write_erf_table(std::ostream& os, const std::vector<ErfRow>& rows);

void write_sd_growth_csv(std::ostream& os, const std::vector<SdGrowthRow>& rows);

/// The k* used for a cell; shared by run_erf and run_sd_growth.
double cell_kstar(const ErfConfig& cfg, double nu, std::size_t T, std::uint64_t seed);

}  // namespace mixar
