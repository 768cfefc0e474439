#pragma once

#include "mixar/lagpoly.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace mixar {

/// Midpoint of the two central order statistics for even lengths.
double median(std::span<const double> x);

/// median(|x_i - median(x)|), no consistency constant.
double mad(std::span<const double> x);

/// Standard deviation with denominator n - 1.
double sample_sd(std::span<const double> x);

/// sample_sd(x) / mad(x). Throws DegenerateError when mad is zero.
double k_statistic(std::span<const double> x);

/// Linear interpolation between order statistics (R type 7); `sorted` must be ascending.
double quantile_sorted(std::span<const double> sorted, double prob);

struct TrimResult {
    double q1 = 0.0;
    double q3 = 0.0;
    double lo = 0.0;  ///< Q1 - 3 IQR
    double hi = 0.0;  ///< Q3 + 3 IQR
    std::vector<double> kept;
};

/// Keeps values inside [Q1 - 3 IQR, Q3 + 3 IQR], preserving input order.
TrimResult trim_interval(std::span<const double> ks);

/// 0.9 min(sd, IQR / 1.34) n^(-1/5), falling back to sd when the IQR is zero.
double silverman_bandwidth(std::span<const double> xs);

struct KdeGrid {
    std::vector<double> x;
    std::vector<double> density;
    double bandwidth = 0.0;
    double mode = 0.0;  ///< grid point of maximum density
};

/**
 * Gaussian-kernel density on a uniform grid spanning [min - 3h, max + 3h].
 * Without an explicit bandwidth, Silverman's rule is applied to `xs`.
 * Throws DegenerateError if `xs` has zero variance.
 */
KdeGrid kde(std::span<const double> xs, std::optional<double> bandwidth = std::nullopt,
            std::size_t grid_points = 512);

double kde_mode(std::span<const double> xs, std::optional<double> bandwidth = std::nullopt,
                std::size_t grid_points = 512);

struct KCalibration {
    double nu = 0.0;  ///< +infinity for the Gaussian path
    std::size_t T = 0;
    std::size_t N = 0;
    std::uint64_t seed = 0;
    double bandwidth = 0.0;
    double kstar = 0.0;
    double trim_lo = 0.0;
    double trim_hi = 0.0;
    double trimmed_fraction = 0.0;
    std::vector<double> grid_x;
    std::vector<double> grid_density;
};

/**
 * @brief Monte-Carlo mode k* of the sd/MAD ratio for t(nu) samples of length T.
 *
 * Replication i draws T values with seed derive_seed(seed, i), so the set of
 * k values does not depend on `threads`. The ks are trimmed to
 * [Q1 - 3 IQR, Q3 + 3 IQR] and k* is the mode of their Gaussian KDE
 * (Silverman bandwidth, 512-point grid). Pass nu = +infinity for Gaussian
 * innovations. The scale of the innovations is irrelevant and fixed at 1.
 *
 * @throws DomainError for nu <= 1.
 * @throws InvalidInput for T < 10 or N < 1000.
 */
KCalibration calibrate_kstar(double nu, std::size_t T, std::size_t N, std::uint64_t seed,
                             unsigned threads = 1);

/// Gaussian-innovation calibration; same as calibrate_kstar(+inf, ...).
KCalibration calibrate_kstar_gaussian(std::size_t T, std::size_t N, std::uint64_t seed,
                                      unsigned threads = 1);

/// Reference k* grid (nu = 1.2..3, T = 100..3000) from a 700000-replication run.
struct KStarTable {
    static constexpr std::size_t kNu = 6;
    static constexpr std::size_t kT = 6;
    static constexpr double nu[kNu] = {1.2, 1.4, 1.5, 1.6, 1.8, 3.0};
    static constexpr std::size_t T[kT] = {100, 200, 500, 1000, 2000, 3000};
    /// value[t][n] for T[t], nu[n]
    static constexpr double value[kT][kNu] = {
        {4.186322, 3.317155, 3.049654, 2.866044, 2.57295, 1.937395},
        {5.311298, 3.901011, 3.557615, 3.2330488, 2.85024, 2.02271},
        {7.266156, 4.941986, 4.297126, 3.849296, 3.233094, 2.082257},
        {9.022733, 5.839081, 4.971029, 4.330869, 3.491673, 2.116381},
        {11.41613, 6.827137, 5.597711, 4.750695, 3.761855, 2.158208},
        {13.20991, 7.448153, 6.022052, 5.128269, 3.902047, 2.166739},
    };
};

/// Table entry on an exact hit, otherwise bilinear interpolation in (nu, log T).
/// Throws DomainError outside the table hull.
double kstar_reference(double nu, std::size_t T);

/// Header `nu,T,N,bandwidth,kstar,trimmed_fraction`, its values, then `x,density` rows.
void write_calibration(std::ostream& os, const KCalibration& cal);

}  // namespace mixar
