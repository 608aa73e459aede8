#pragma once

#include <cmath>
#include <complex>

#include "sims/core.hpp"

namespace sims {

// Complex Gamma function, Lanczos rational approximation (g = 607/128,
// 15 terms) with reflection for Re z < 1/2.  Relative error stays well
// below 1e-12 for |z| <= 50 away from the poles.
inline cplx complex_gamma(const cplx& z0) {
    static const double g = 607.0 / 128.0;
    static const double c[15] = {
        0.99999999999999709182,     57.156235665862923517,     -59.597960355475491248,
        14.136097974741747174,      -0.49191381609762019978,   0.33994649984811888699e-4,
        0.46523628927048575665e-4,  -0.98374475304879564677e-4, 0.15808870322491248884e-3,
        -0.21026444172410488319e-3, 0.21743961811521264320e-3, -0.16431810653676389022e-3,
        0.84418223983852743293e-4,  -0.26190838401581408670e-4, 0.36899182659531622704e-5};

    cplx z = z0;
    if (z.real() < 0.5) {
        // reflection; poles at nonpositive integers
        if (z.imag() == 0.0 && z.real() == std::floor(z.real()))
            throw input_error("complex_gamma: pole at a nonpositive integer");
        const cplx s = std::sin(pi * z);
        if (std::abs(s) == 0.0) throw input_error("complex_gamma: pole");
        return pi / (s * complex_gamma(1.0 - z));
    }
    z -= 1.0;
    cplx a = c[0];
    for (int k = 1; k < 15; ++k) a += c[k] / (z + static_cast<double>(k));
    const cplx t = z + g + 0.5;
    return std::sqrt(2.0 * pi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

}  // namespace sims
