#pragma once

#include "mixar/lagpoly.hpp"
#include "mixar/tdist.hpp"

#include <cstddef>
#include <vector>

namespace mixar {

/// MAR(r,s): phi(L) varphi(L^-1) y_t = eps_t with eps_t ~ t(nu) scaled by eta.
struct MarModel {
    std::vector<double> phi;   ///< causal coefficients, length r
    std::vector<double> vphi;  ///< noncausal coefficients, length s
    TParams dist;

    std::size_t r() const noexcept { return phi.size(); }
    std::size_t s() const noexcept { return vphi.size(); }
    std::size_t p() const noexcept { return phi.size() + vphi.size(); }

    LagPolynomial causal() const { return LagPolynomial(phi); }
    LagPolynomial noncausal() const { return LagPolynomial(vphi); }

    /// Both polynomials stationary and distribution parameters valid.
    bool valid() const;
};

}  // namespace mixar
