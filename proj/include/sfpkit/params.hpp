#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace sfpkit {

enum class Boundary { box, torus };

inline const char* to_string(Boundary b) {
    return b == Boundary::box ? "box" : "torus";
}

inline Boundary boundary_from_string(const std::string& s) {
    if (s == "box") return Boundary::box;
    if (s == "torus") return Boundary::torus;
    throw std::invalid_argument("unknown boundary mode '" + s + "' (expected box|torus)");
}

// Model parameters. gamma is always recomputed from alpha, tau, d.
struct SfpParams {
    int d = 2;
    double alpha = 2.0;
    double tau = 2.0;
    double rho = 1.0;
    double volume = 1.0;
    Boundary boundary = Boundary::box;

    double gamma() const { return alpha * (tau - 1.0) / d; }
    double side() const { return std::pow(volume, 1.0 / d); }

    void validate() const {
        if (d < 1) throw std::invalid_argument("d must be a positive integer");
        if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
        if (!(tau > 1.0))
            throw std::invalid_argument("tau must be > 1 (weights need a finite tail exponent)");
        if (!(rho > 0.0)) throw std::invalid_argument("rho must be > 0");
        if (!(volume > 0.0)) throw std::invalid_argument("volume must be > 0");
    }
};

}  // namespace sfpkit
