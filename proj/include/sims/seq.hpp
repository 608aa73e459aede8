#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "sims/core.hpp"

namespace sims {

enum class TailVerdict { Convergent, Divergent, Inconclusive };

inline const char* tail_verdict_name(TailVerdict v) {
    switch (v) {
        case TailVerdict::Convergent: return "finite";
        case TailVerdict::Divergent: return "infinite";
        case TailVerdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

// Convergence of an improper integral from its increments over a geometric
// schedule.  Increments of x^e over octaves scale by sigma^(e+1), so a
// sustained ratio below 1 means the integral converges.  The bands leave an
// inconclusive margin around the logarithmic borderline.
inline TailVerdict tail_ratio_verdict(const std::vector<double>& increments,
                                      double conv_band = 0.9, double div_band = 1.02,
                                      int sustain = 4) {
    const int n = static_cast<int>(increments.size());
    if (n < sustain + 1) return TailVerdict::Inconclusive;
    for (double v : increments)
        if (!std::isfinite(v)) return TailVerdict::Divergent;  // accumulator overflow
    double total = 0.0;
    for (double v : increments) total += std::abs(v);
    if (total == 0.0) return TailVerdict::Convergent;

    std::vector<double> prefix(increments.size());
    double run = 0.0;
    for (std::size_t k = 0; k < increments.size(); ++k) {
        run += std::abs(increments[k]);
        prefix[k] = run;
    }

    int conv = 0, div = 0, tiny = 0;
    std::vector<double> ratios;
    for (int k = n - sustain; k < n; ++k) {
        const double prev = std::abs(increments[k - 1]);
        const double cur = std::abs(increments[k]);
        // at the rounding floor of an already settled sum
        if (cur <= 1e-13 * prefix[k - 1] && prev <= 1e-13 * prefix[k - 1]) {
            ++tiny;
            continue;
        }
        if (prev == 0.0) return TailVerdict::Inconclusive;
        const double r = cur / prev;
        ratios.push_back(r);
        if (r < conv_band) ++conv;
        else if (r > div_band) ++div;
    }
    if (conv + tiny == sustain) return TailVerdict::Convergent;
    if (div == sustain) return TailVerdict::Divergent;
    // trend rules: the ratio limit decides convergence for monotone densities,
    // so a strictly moving ratio that has crossed the band already decides
    if (static_cast<int>(ratios.size()) == sustain) {
        bool decreasing = true, increasing = true;
        for (std::size_t k = 1; k < ratios.size(); ++k) {
            decreasing = decreasing && ratios[k] < ratios[k - 1];
            increasing = increasing && ratios[k] > ratios[k - 1];
        }
        if (decreasing && ratios.back() < conv_band) return TailVerdict::Convergent;
        if (increasing && ratios.back() > 1.05) return TailVerdict::Divergent;
    }
    return TailVerdict::Inconclusive;
}

// Wynn epsilon acceleration of a complex sequence of partial sums.
// Returns the accelerated limit and a crude error estimate (difference of
// the last two usable table entries).
struct WynnResult {
    cplx limit{0.0, 0.0};
    double error = inf;
    bool ok = false;
};

inline WynnResult wynn_epsilon(const std::vector<cplx>& sums) {
    const std::size_t n = sums.size();
    if (n == 0) return {};
    if (n == 1) return {sums[0], inf, true};

    std::vector<std::vector<cplx>> eps(n + 1);
    eps[0].assign(n, {0.0, 0.0});  // eps_{-1} = 0
    eps[1] = sums;                 // eps_0

    double scale = 0.0;
    for (const cplx& s : sums) scale = std::max(scale, std::abs(s));
    if (scale == 0.0) return {{0.0, 0.0}, 0.0, true};

    WynnResult best{sums.back(), std::abs(sums.back() - sums[n - 2]), true};
    for (std::size_t k = 2; k <= n; ++k) {
        const std::size_t len = n + 1 - k;
        eps[k].assign(len, {0.0, 0.0});
        bool row_ok = true;
        for (std::size_t j = 0; j < len; ++j) {
            const cplx d = eps[k - 1][j + 1] - eps[k - 1][j];
            if (std::abs(d) < 1e-300) {
                row_ok = false;
                break;
            }
            eps[k][j] = eps[k - 2][j + 1] + 1.0 / d;
        }
        if (!row_ok) break;
        if (k % 2 == 1) continue;  // odd rows are auxiliary
        const cplx est = eps[k].back();
        const double err = std::abs(est - best.limit);
        if (!std::isfinite(est.real()) || !std::isfinite(est.imag())) break;
        // accept monotone improvements of the error estimate
        if (err < best.error || k == 2) {
            best.limit = est;
            best.error = err;
        } else if (err > 10.0 * best.error + 1e-14 * scale) {
            break;  // table started to diverge (noise amplification)
        }
    }
    return best;
}

inline WynnResult wynn_epsilon_real(const std::vector<double>& sums) {
    std::vector<cplx> c(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i) c[i] = sums[i];
    return wynn_epsilon(c);
}

// Iterated Aitken delta-squared acceleration; suited to sequences
// s_k = s + a r^k (1 + o(1)).  Error estimate: last correction applied.
inline WynnResult aitken_iterated(std::vector<cplx> s, int rounds = 2) {
    WynnResult res;
    if (s.empty()) return res;
    res.limit = s.back();
    res.error = s.size() > 1 ? std::abs(s.back() - s[s.size() - 2]) : inf;
    res.ok = true;
    for (int r = 0; r < rounds && s.size() >= 3; ++r) {
        std::vector<cplx> t;
        for (std::size_t k = 0; k + 2 < s.size(); ++k) {
            const cplx d1 = s[k + 1] - s[k];
            const cplx d2 = s[k + 2] - s[k + 1];
            const cplx den = d2 - d1;
            if (std::abs(den) < 1e-14 * (std::abs(d1) + std::abs(d2)) + 1e-300) {
                t.push_back(s[k + 2]);
                continue;
            }
            t.push_back(s[k + 2] - d2 * d2 / den);
        }
        if (t.empty()) break;
        const cplx prev = res.limit;
        res.limit = t.back();
        res.error = std::abs(res.limit - prev);
        s.swap(t);
    }
    return res;
}

// Least-squares slope/intercept of y against x.
struct LineFit {
    double slope = 0.0, intercept = 0.0, rms = inf;
    bool ok = false;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    LineFit f;
    if (n < 2 || y.size() != n) return f;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double den = n * sxx - sx * sx;
    if (std::abs(den) < 1e-300) return f;
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) ss += sq(y[i] - (f.slope * x[i] + f.intercept));
    f.rms = std::sqrt(ss / n);
    f.ok = true;
    return f;
}

}  // namespace sims
