#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "sims/core.hpp"

namespace sims {

struct IntegrationSettings {
    double rtol = 1e-11;
    double atol = 1e-13;
    double max_step = inf;
    double first_step = 0.0;  // 0 = auto
};

// Dormand-Prince 5(4) adaptive integrator over a fixed-size real state.
//
// System requirements:
//   static constexpr std::size_t dim;
//   void rhs(double x, const double* y, double* dy) const;
//   void after_accept(double x, double* y);   // may renormalize the state
//
// Integrates from x0 to x1 (either direction), calling `emit(x, y)` exactly
// at every point of `outputs` (which must be monotone in the direction of
// travel, within [x0, x1]).
template <class Sys, class Emit>
void rk45_integrate(Sys& sys, double x0, double x1, double* y,
                    std::span<const double> outputs, const IntegrationSettings& st,
                    Emit&& emit) {
    constexpr std::size_t N = Sys::dim;
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // embedded 4th-order weights
    static constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640,
                            e5 = -92097.0 / 339200, e6 = 187.0 / 2100, e7 = 1.0 / 40;

    const double dir = (x1 >= x0) ? 1.0 : -1.0;
    const double span = std::abs(x1 - x0);
    if (span == 0.0) {
        for (double xo : outputs) (void)xo, emit(x0, y);
        return;
    }

    std::array<double, N> k1, k2, k3, k4, k5, k6, k7, yt, y5;
    double x = x0;
    std::size_t next_out = 0;

    // skip outputs that coincide with the start
    while (next_out < outputs.size() && std::abs(outputs[next_out] - x) <= 1e-14 * (1.0 + std::abs(x))) {
        emit(x, y);
        ++next_out;
    }

    sys.rhs(x, y, k1.data());
    double h = st.first_step;
    if (h <= 0.0) {
        double ynorm = 0.0, fnorm = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            ynorm = std::max(ynorm, std::abs(y[i]));
            fnorm = std::max(fnorm, std::abs(k1[i]));
        }
        h = (fnorm > 0.0) ? 0.01 * std::max(ynorm, 1.0) / fnorm : span / 100.0;
        h = std::min(h, span / 10.0);
    }
    h = std::min(h, st.max_step);

    const double hmin_floor = std::max(span, std::abs(x0)) * 1e-15;
    bool k1_valid = true;
    double prev_err = 1.0;

    while (dir * (x1 - x) > 0.0) {
        double target = x1;
        bool is_output = false;
        if (next_out < outputs.size() && dir * (outputs[next_out] - x1) <= 0.0) {
            target = outputs[next_out];
            is_output = true;
        }
        double step = std::min(h, st.max_step);
        if (dir * (x + dir * step - target) >= 0.0) {
            step = dir * (target - x);
            if (step <= 0.0) {  // already at target
                emit(x, y);
                ++next_out;
                continue;
            }
        } else {
            is_output = false;
        }

        if (step < hmin_floor)
            throw numeric_error("integrator step underflow near x = " + std::to_string(x));

        if (!k1_valid) sys.rhs(x, y, k1.data());
        const double hs = dir * step;

        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + hs * a21 * k1[i];
        sys.rhs(x + c2 * hs, yt.data(), k2.data());
        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
        sys.rhs(x + c3 * hs, yt.data(), k3.data());
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        sys.rhs(x + c4 * hs, yt.data(), k4.data());
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        sys.rhs(x + c5 * hs, yt.data(), k5.data());
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        sys.rhs(x + hs, yt.data(), k6.data());
        for (std::size_t i = 0; i < N; ++i)
            y5[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        sys.rhs(x + hs, y5.data(), k7.data());

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double y4i = y[i] + hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                            e6 * k6[i] + e7 * k7[i]);
            const double sc = st.atol + st.rtol * std::max(std::abs(y[i]), std::abs(y5[i]));
            err = std::max(err, std::abs(y5[i] - y4i) / sc);
        }

        if (err <= 1.0 || step <= hmin_floor * 2.0) {
            x += hs;
            std::copy(y5.begin(), y5.end(), y);
            sys.after_accept(x, y);
            k1_valid = false;  // state may have been rescaled
            if (is_output && std::abs(x - target) <= 1e-14 * (1.0 + std::abs(target))) {
                emit(x, y);
                ++next_out;
                while (next_out < outputs.size() &&
                       std::abs(outputs[next_out] - x) <= 1e-14 * (1.0 + std::abs(x))) {
                    emit(x, y);
                    ++next_out;
                }
            }
            // PI controller
            const double e_clamped = std::max(err, 1e-10);
            double fac = 0.9 * std::pow(e_clamped, -0.7 / 5.0) * std::pow(prev_err, 0.4 / 5.0);
            fac = std::clamp(fac, 0.2, 6.0);
            h = step * fac;
            prev_err = e_clamped;
        } else {
            h = step * std::max(0.1, 0.9 * std::pow(err, -1.0 / 5.0));
        }
    }

    while (next_out < outputs.size() &&
           std::abs(outputs[next_out] - x) <= 1e-12 * (1.0 + std::abs(x))) {
        emit(x, y);
        ++next_out;
    }
}

}  // namespace sims
