#pragma once

#include "mixar/model.hpp"

#include <cstddef>
#include <cstdint>
#include <span>

namespace mixar {

inline constexpr std::size_t kDefaultBurn = 500;

struct SimConfig {
    std::size_t T = 0;
    MarModel model;
    std::size_t burn = kDefaultBurn;  ///< discarded on each side
    std::uint64_t seed = 0;
};

/**
 * @brief Simulates a MAR(r,s) path of length T.
 *
 * Innovations are drawn from one stream: the central T values first, then
 * the burn-in alternating head and tail, moving outward from the window.
 * Lengthening the burn-in only adds innovations farther from the sample.
 *
 * The noncausal part is solved backward, w_t = eps_t + sum_j varphi_j w_{t+j},
 * from a zero tail; the causal part forward, y_t = w_t + sum_i phi_i y_{t-i},
 * from a zero head. The central T values are returned.
 *
 * @throws DomainError if either polynomial is not stationary.
 */
Series simulate_mar(const SimConfig& cfg);

/// eps_t = phi(L) varphi(L^-1) y_t for t = r+1..T-s (length T - p).
Series residuals(std::span<const double> y, const MarModel& model);

}  // namespace mixar
