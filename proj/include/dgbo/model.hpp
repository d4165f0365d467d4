#ifndef DGBO_MODEL_HPP
#define DGBO_MODEL_HPP

#include <cmath>
#include <string>

#include "dgbo/damping.hpp"

namespace dgbo {

/// Dispersion exponent alpha, dissipation exponent beta and the damping profile.
struct ModelParams {
    double alpha = 1.5;
    double beta = 0.8;
    DampingProfile damping;

    /// L_k = k |k|^alpha.
    double L(int k) const { return dispersion_relation(k, alpha); }

    static double dispersion_relation(int k, double alpha) {
        return k * std::pow(std::abs(static_cast<double>(k)), alpha);
    }

    /// Range required by the nonlinear theory: 1 < alpha <= 2, 2 - alpha < beta < alpha.
    void validate_nonlinear() const {
        if (!(alpha > 1.0 && alpha <= 2.0))
            throw ArgumentError("alpha = " + std::to_string(alpha) + " outside (1, 2]");
        if (!(beta > 2.0 - alpha && beta < alpha))
            throw ArgumentError("beta = " + std::to_string(beta) + " outside (2 - alpha, alpha)");
    }

    /// Linear operations admit alpha > 0 and beta >= 0.
    void validate_linear() const {
        if (!(alpha > 0.0)) throw ArgumentError("alpha = " + std::to_string(alpha) + " must be > 0");
        if (!(beta >= 0.0)) throw ArgumentError("beta = " + std::to_string(beta) + " must be >= 0");
    }
};

} // namespace dgbo

#endif
