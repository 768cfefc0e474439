#include "mixar/robustscale.hpp"

#include "mixar/errors.hpp"
#include "mixar/parallel.hpp"
#include "mixar/rng.hpp"
#include "mixar/tdist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

namespace mixar {

namespace {

/// Median of a scratch buffer; reorders it.
double median_inplace(std::vector<double>& v) {
    const std::size_t n = v.size();
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    const double upper = *mid;
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
}

double mad_inplace(std::vector<double>& v) {
    const double m = median_inplace(v);
    for (auto& x : v) x = std::abs(x - m);
    return median_inplace(v);
}

}  // namespace

double median(std::span<const double> x) {
    if (x.empty()) throw InvalidInput("median of an empty sample");
    std::vector<double> v(x.begin(), x.end());
    return median_inplace(v);
}

double mad(std::span<const double> x) {
    if (x.empty()) throw InvalidInput("mad of an empty sample");
    std::vector<double> v(x.begin(), x.end());
    return mad_inplace(v);
}

double sample_sd(std::span<const double> x) {
    if (x.size() < 2) throw InvalidInput("sample_sd needs at least two values");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / static_cast<double>(x.size() - 1));
}

double k_statistic(std::span<const double> x) {
    const double m = mad(x);
    if (!(m > 0.0)) throw DegenerateError("k statistic undefined: MAD is zero");
    return sample_sd(x) / m;
}

double quantile_sorted(std::span<const double> sorted, double prob) {
    if (sorted.empty()) throw InvalidInput("quantile of an empty sample");
    if (!(prob >= 0.0 && prob <= 1.0)) throw InvalidInput("quantile probability outside [0, 1]");
    const double h = static_cast<double>(sorted.size() - 1) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

TrimResult trim_interval(std::span<const double> ks) {
    if (ks.empty()) throw InvalidInput("trim_interval of an empty sample");
    std::vector<double> sorted(ks.begin(), ks.end());
    std::sort(sorted.begin(), sorted.end());
    TrimResult out;
    out.q1 = quantile_sorted(sorted, 0.25);
    out.q3 = quantile_sorted(sorted, 0.75);
    const double iqr = out.q3 - out.q1;
    out.lo = out.q1 - 3.0 * iqr;
    out.hi = out.q3 + 3.0 * iqr;
    out.kept.reserve(ks.size());
    for (double k : ks) {
        if (k >= out.lo && k <= out.hi) out.kept.push_back(k);
    }
    return out;
}

double silverman_bandwidth(std::span<const double> xs) {
    if (xs.size() < 2) throw InvalidInput("bandwidth needs at least two values");
    const double sd = sample_sd(xs);
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
    double spread = std::min(sd, iqr / 1.34);
    if (!(spread > 0.0)) spread = sd;
    if (!(spread > 0.0)) throw DegenerateError("bandwidth undefined: sample has zero variance");
    return 0.9 * spread * std::pow(static_cast<double>(xs.size()), -0.2);
}

KdeGrid kde(std::span<const double> xs, std::optional<double> bandwidth, std::size_t grid_points) {
    if (xs.size() < 2) throw InvalidInput("kde needs at least two values");
    if (grid_points < 2) throw InvalidInput("kde needs at least two grid points");
    std::vector<double> sorted(xs.begin(), xs.end());
    std::sort(sorted.begin(), sorted.end());
    if (!(sorted.back() > sorted.front())) throw DegenerateError("kde: sample has zero variance");

    KdeGrid out;
    out.bandwidth = bandwidth ? *bandwidth : silverman_bandwidth(xs);
    const double h = out.bandwidth;
    if (!(h > 0.0) || !std::isfinite(h)) throw InvalidInput("kde: bandwidth must be positive");

    const double lo = sorted.front() - 3.0 * h;
    const double hi = sorted.back() + 3.0 * h;
    const double step = (hi - lo) / static_cast<double>(grid_points - 1);
    const double norm = 1.0 / (static_cast<double>(sorted.size()) * h * std::sqrt(2.0 * std::numbers::pi));
    // contributions beyond 8h are below 1e-14 of the peak
    const double reach = 8.0 * h;

    out.x.resize(grid_points);
    out.density.resize(grid_points);
    std::size_t best = 0;
    for (std::size_t g = 0; g < grid_points; ++g) {
        const double x = lo + step * static_cast<double>(g);
        const auto first = std::lower_bound(sorted.begin(), sorted.end(), x - reach);
        const auto last = std::upper_bound(first, sorted.end(), x + reach);
        double sum = 0.0;
        for (auto it = first; it != last; ++it) {
            const double u = (x - *it) / h;
            sum += std::exp(-0.5 * u * u);
        }
        out.x[g] = x;
        out.density[g] = sum * norm;
        if (out.density[g] > out.density[best]) best = g;
    }
    out.mode = out.x[best];
    return out;
}

double kde_mode(std::span<const double> xs, std::optional<double> bandwidth, std::size_t grid_points) {
    return kde(xs, bandwidth, grid_points).mode;
}

KCalibration calibrate_kstar(double nu, std::size_t T, std::size_t N, std::uint64_t seed,
                             unsigned threads) {
    if (!(nu > 1.0)) {
        throw DomainError("calibrate_kstar: nu must exceed 1 (the robust scale is calibrated for nu in (1, D])");
    }
    if (T < 10) throw InvalidInput("calibrate_kstar: T must be at least 10");
    if (N < 1000) throw InvalidInput("calibrate_kstar: N must be at least 1000");

    const bool gaussian = std::isinf(nu);
    std::vector<double> ks(N);
    parallel_for(N, threads, [&](std::size_t i) {
        std::vector<double> draws(T);
        const std::uint64_t s = derive_seed(seed, i);
        if (gaussian) {
            Rng rng(s);
            std::normal_distribution<double> normal(0.0, 1.0);
            for (auto& d : draws) d = normal(rng);
        } else {
            StudentTSampler draw(TParams{nu, 1.0}, s);
            for (auto& d : draws) d = draw();
        }
        const double sd = sample_sd(draws);
        const double m = mad_inplace(draws);
        if (!(m > 0.0)) throw DegenerateError("calibrate_kstar: replication with zero MAD");
        ks[i] = sd / m;
    });

    const TrimResult trimmed = trim_interval(ks);
    const KdeGrid density = kde(trimmed.kept);

    KCalibration cal;
    cal.nu = nu;
    cal.T = T;
    cal.N = N;
    cal.seed = seed;
    cal.bandwidth = density.bandwidth;
    cal.kstar = density.mode;
    cal.trim_lo = trimmed.lo;
    cal.trim_hi = trimmed.hi;
    cal.trimmed_fraction = 1.0 - static_cast<double>(trimmed.kept.size()) / static_cast<double>(N);
    cal.grid_x = density.x;
    cal.grid_density = density.density;
    return cal;
}

KCalibration calibrate_kstar_gaussian(std::size_t T, std::size_t N, std::uint64_t seed,
                                      unsigned threads) {
    return calibrate_kstar(std::numeric_limits<double>::infinity(), T, N, seed, threads);
}

double kstar_reference(double nu, std::size_t T) {
    using Tab = KStarTable;
    if (!(nu >= Tab::nu[0] && nu <= Tab::nu[Tab::kNu - 1]) || T < Tab::T[0] ||
        T > Tab::T[Tab::kT - 1]) {
        throw DomainError("kstar_reference: (nu, T) outside the reference table");
    }
    auto bracket = [](auto&& grid, std::size_t size, double v) {
        std::size_t i = 0;
        while (i + 2 < size && v > static_cast<double>(grid[i + 1])) ++i;
        return i;
    };
    const std::size_t n0 = bracket(Tab::nu, Tab::kNu, nu);
    const std::size_t t0 = bracket(Tab::T, Tab::kT, static_cast<double>(T));

    const double nu_lo = Tab::nu[n0], nu_hi = Tab::nu[n0 + 1];
    const double lt = std::log(static_cast<double>(T));
    const double lt_lo = std::log(static_cast<double>(Tab::T[t0]));
    const double lt_hi = std::log(static_cast<double>(Tab::T[t0 + 1]));
    const double wn = (nu - nu_lo) / (nu_hi - nu_lo);
    const double wt = (lt - lt_lo) / (lt_hi - lt_lo);

    // exact grid hits reproduce the stored value bit for bit
    if (wn == 0.0 && wt == 0.0) return Tab::value[t0][n0];
    if (wn == 1.0 && wt == 0.0) return Tab::value[t0][n0 + 1];
    if (wn == 0.0 && wt == 1.0) return Tab::value[t0 + 1][n0];
    if (wn == 1.0 && wt == 1.0) return Tab::value[t0 + 1][n0 + 1];

    return (1 - wn) * (1 - wt) * Tab::value[t0][n0] + wn * (1 - wt) * Tab::value[t0][n0 + 1] +
           (1 - wn) * wt * Tab::value[t0 + 1][n0] + wn * wt * Tab::value[t0 + 1][n0 + 1];
}

void write_calibration(std::ostream& os, const KCalibration& cal) {
    const auto old_precision = os.precision(10);
    os << "nu,T,N,bandwidth,kstar,trimmed_fraction\n";
    if (std::isinf(cal.nu)) {
        os << "inf";
    } else {
        os << cal.nu;
    }
    os << ',' << cal.T << ',' << cal.N << ',' << cal.bandwidth << ',' << cal.kstar << ','
       << cal.trimmed_fraction << '\n';
    os << "x,density\n";
    for (std::size_t i = 0; i < cal.grid_x.size(); ++i) {
        os << cal.grid_x[i] << ',' << cal.grid_density[i] << '\n';
    }
    os.precision(old_precision);
}

}  // namespace mixar
