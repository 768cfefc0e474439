#include "mixar/simplex.hpp"

#include "mixar/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mixar {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

using Point = std::vector<double>;

}  // namespace

SimplexResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                          std::vector<double> start, const SimplexOptions& opts) {
    const std::size_t n = start.size();
    SimplexResult result;
    int evals = 0;
    auto f = [&](const Point& x) {
        ++evals;
        const double v = objective(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    if (n == 0) {
        result.x = start;
        result.fx = f(start);
        result.evaluations = evals;
        result.converged = std::isfinite(result.fx);
        return result;
    }

    std::vector<Point> vertex(n + 1, start);
    std::vector<double> value(n + 1);
    for (std::size_t i = 0; i < n; ++i) vertex[i + 1][i] += opts.initial_step;
    for (std::size_t i = 0; i <= n; ++i) value[i] = f(vertex[i]);

    std::vector<std::size_t> order(n + 1);
    auto diameter = [&](std::size_t best) {
        double d = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                d = std::max(d, std::abs(vertex[i][k] - vertex[best][k]));
            }
        }
        return d;
    };

    Point centroid(n), trial(n), trial2(n);
    double diam = std::numeric_limits<double>::infinity();
    while (true) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];

        diam = diameter(best);
        if (diam < opts.xtol || evals >= opts.max_evaluations) break;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t k = 0; k < n; ++k) centroid[k] += vertex[i][k];
        }
        for (auto& c : centroid) c /= static_cast<double>(n);

        for (std::size_t k = 0; k < n; ++k) {
            trial[k] = centroid[k] + kReflect * (centroid[k] - vertex[worst][k]);
        }
        const double f_reflect = f(trial);

        if (f_reflect < value[best]) {
            for (std::size_t k = 0; k < n; ++k) {
                trial2[k] = centroid[k] + kExpand * (trial[k] - centroid[k]);
            }
            const double f_expand = f(trial2);
            if (f_expand < f_reflect) {
                vertex[worst] = trial2;
                value[worst] = f_expand;
            } else {
                vertex[worst] = trial;
                value[worst] = f_reflect;
            }
            continue;
        }
        if (f_reflect < value[second]) {
            vertex[worst] = trial;
            value[worst] = f_reflect;
            continue;
        }

        // contraction: outside if the reflection improved on the worst point
        const bool outside = f_reflect < value[worst];
        const Point& toward = outside ? trial : vertex[worst];
        for (std::size_t k = 0; k < n; ++k) {
            trial2[k] = centroid[k] + kContract * (toward[k] - centroid[k]);
        }
        const double f_contract = f(trial2);
        if (f_contract < std::min(f_reflect, value[worst])) {
            vertex[worst] = trial2;
            value[worst] = f_contract;
            continue;
        }

        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t k = 0; k < n; ++k) {
                vertex[i][k] = vertex[best][k] + kShrink * (vertex[i][k] - vertex[best][k]);
            }
            value[i] = f(vertex[i]);
        }
    }

    const std::size_t best = order.front();
    result.x = vertex[best];
    result.fx = value[best];
    result.diameter = diam;
    result.evaluations = evals;
    result.converged = diam < opts.xtol && std::isfinite(result.fx);
    return result;
}

}  // namespace mixar
