#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sims/core.hpp"
#include "sims/odecore.hpp"
#include "sims/problem.hpp"
#include "sims/seq.hpp"

namespace sims {

// l_X(lambda, z) = -(theta z + p theta') / (phi z + p phi').
// Scale-invariant: uses the jointly rescaled frame values.
inline cplx mobius_l(const SolutionFrame& f, const cplx& z) {
    const cplx den = f.phi * z + f.p_dphi;
    if (std::abs(den) == 0.0) throw numeric_error("mobius_l: z at the pole of the map");
    return -(f.theta * z + f.p_dtheta) / den;
}

// Inverse map z_X(lambda, l) = -(p phi' l + p theta') / (phi l + theta),
// which also equals -p psi_l'(X)/psi_l(X) for psi_l = theta + l phi.
inline cplx mobius_z(const SolutionFrame& f, const cplx& l) {
    const cplx den = f.phi * l + f.theta;
    if (std::abs(den) == 0.0) throw numeric_error("mobius_z: l at the pole of the map");
    return -(f.p_dphi * l + f.p_dtheta) / den;
}

// Boundary form A(alpha, eta; l); psi_l lies in the disk D_X exactly when its
// rotated energy over [a, X] does not exceed this value.
inline double a_functional(const cplx& alpha, double eta, const cplx& l) {
    const cplx ca = std::cos(alpha), sa = std::sin(alpha);
    const cplx v = std::polar(1.0, eta) * (sa - l * ca) * (std::conj(ca) + std::conj(l * sa));
    return -v.real();
}

struct WeylDisk {
    double x = 0.0;
    cplx lambda;
    cplx center;
    double radius = inf;                // integral-form value
    double radius_boundary_form = inf;  // 1 / (2 |Re e^{i eta} p phi' conj(phi)|)
    double log_radius = inf;            // log of the integral-form radius
};

// Disk from a frame at X.  The radius is computed both from the boundary form
// and from the accumulated energy integral; the two must agree.  Comparisons
// are made in log scale so that deep truncations (radius below the double
// range) still certify.
inline WeylDisk weyl_disk_from_frame(const SolutionFrame& f, const cplx& alpha, double eta,
                                     const cplx& lambda, double tol = 1e-6) {
    const cplx ei = std::polar(1.0, eta);
    const cplx e2i = ei * ei;

    WeylDisk d;
    d.x = f.x;
    d.lambda = lambda;

    // centre: image of the reflected critical point of the rotated map
    const cplx num = f.theta * std::conj(f.p_dphi) + f.p_dtheta * e2i * std::conj(f.phi);
    const cplx den = f.phi * std::conj(f.p_dphi) + f.p_dphi * e2i * std::conj(f.phi);
    d.center = (std::abs(den) > 0.0) ? -num / den : cplx(inf, inf);

    const double bt = -(ei * std::cos(alpha) * std::conj(std::sin(alpha))).real();

    const ScaledReal re_form =
        ScaledReal((ei * f.p_dphi * std::conj(f.phi)).real(), 2.0 * f.log_scale);
    const ScaledReal denom_b = ScaledReal::from(2.0) * re_form;
    const ScaledReal denom_i = (ScaledReal::from(bt) + f.energy_phi) * ScaledReal::from(2.0);
    if (denom_i.m < 0.0)
        throw numeric_error("weyl disk: energy denominator negative (inadmissible pair?)");

    const double log_b = (denom_b.m == 0.0) ? -inf : -denom_b.log_abs();
    const double log_i = (denom_i.m == 0.0) ? -inf : -denom_i.log_abs();
    auto exp_sat = [](double t) {
        if (t == inf) return inf;
        if (t > 700.0) return inf;
        if (t < -745.0) return 0.0;
        return std::exp(t);
    };
    d.log_radius = (log_i == -inf) ? inf : log_i;
    d.radius = (log_i == -inf) ? inf : exp_sat(log_i);
    d.radius_boundary_form = (log_b == -inf) ? inf : exp_sat(log_b);

    const bool b_inf = (log_b == -inf), i_inf = (log_i == -inf);
    if (b_inf != i_inf)
        throw numeric_error("weyl disk: radius formulas disagree (one infinite) at X = " +
                            std::to_string(f.x));
    // |log r1 - log r2| <= ~tol is relative agreement of the radii; disks with
    // radius beyond 1e13 are effectively infinite and are not certified.
    if (!b_inf && std::min(log_b, log_i) < 30.0) {
        if (!(std::abs(log_b - log_i) <= tol))
            throw numeric_error(
                "weyl disk: radius formulas disagree at X = " + std::to_string(f.x) +
                " (log boundary " + std::to_string(log_b) + ", log integral " +
                std::to_string(log_i) + ")");
    }
    return d;
}

inline WeylDisk weyl_disk(const CoefficientProblem& pr, double eta, const cplx& K,
                          const cplx& lambda, double X, double tol = 1e-6,
                          const IntegrationSettings& st = {}) {
    if (!((std::polar(1.0, eta) * (lambda - K)).real() < 0.0))
        throw input_error("weyl_disk: lambda outside the admissible half-plane");
    const double out[1] = {X};
    const auto frames = integrate_pair(pr, lambda, eta, K, out, st);
    return weyl_disk_from_frame(frames.back(), pr.alpha, eta, lambda, tol);
}

// Membership of l in D_X via the energy form and via the disk geometry; the
// two characterizations are required to agree outside a small boundary band.
inline bool disk_membership(const SolutionFrame& f, const cplx& alpha, double eta,
                            const cplx& lambda, const cplx& l, double tol = 1e-9) {
    const double energy = f.energy_psi(l).value();
    const double bound = a_functional(alpha, eta, l);
    const bool by_energy = energy <= bound + tol;

    const WeylDisk d = weyl_disk_from_frame(f, alpha, eta, lambda);
    const bool by_geometry = std::abs(l - d.center) <= d.radius + tol;

    if (by_energy != by_geometry) {
        // tolerate genuine boundary cases only
        const double energy_slack = std::abs(energy - bound);
        const double geom_slack = std::abs(std::abs(l - d.center) - d.radius);
        const double band = 1e-6 * (1.0 + std::abs(bound) + d.radius);
        if (energy_slack > band && geom_slack > band)
            throw numeric_error("disk membership: energy and geometric answers disagree");
    }
    return by_energy;
}

// ---------------------------------------------------------------------------

struct LimitResult {
    enum class Kind { LimitPoint, LimitCircle } kind = Kind::LimitPoint;
    cplx m;                  // limit point, or selected disk value
    double error_bound = 0;  // radius at the last truncation / extrapolation error
    WeylDisk final_disk;     // extrapolated disk in the limit-circle case
    double eta = 0.0;
    cplx K;
    std::vector<double> xs;
    std::vector<cplx> centers;
    std::vector<double> radii;
};

struct LimitThresholds {
    double limit_point_radius = 1e-8;  // extrapolated radius below this => limit point
    double nesting_tol = 1e-8;
    double disk_agreement_tol = 1e-6;
};

// Disks along the schedule, nesting verification, and the limit object.
inline LimitResult limit_disk(const CoefficientProblem& pr, double eta, const cplx& K,
                              const cplx& lambda, const TruncationSchedule& sched,
                              const LimitThresholds& th = {},
                              const IntegrationSettings& st = {}) {
    if (sched.points.size() < 4) throw input_error("limit_disk: schedule too short (need >= 4)");
    if (!((std::polar(1.0, eta) * (lambda - K)).real() < 0.0))
        throw input_error("limit_disk: lambda outside the admissible half-plane");

    const auto frames = integrate_pair(pr, lambda, eta, K, sched.points, st);

    LimitResult res;
    res.eta = eta;
    res.K = K;
    std::vector<double> log_radii;
    for (const auto& f : frames) {
        const WeylDisk d = weyl_disk_from_frame(f, pr.alpha, eta, lambda, th.disk_agreement_tol);
        res.xs.push_back(d.x);
        res.centers.push_back(d.center);
        res.radii.push_back(d.radius);
        log_radii.push_back(d.log_radius);
    }

    // nesting: |center_Y - center_X| + rho_Y <= rho_X, radii strictly decreasing
    // (checked in log scale once the radii leave the double range)
    for (std::size_t i = 0; i + 1 < res.radii.size(); ++i) {
        const double rx = res.radii[i], ry = res.radii[i + 1];
        if (!std::isfinite(log_radii[i]) || log_radii[i] > 700.0) continue;
        if (!(log_radii[i + 1] < log_radii[i]))
            throw numeric_error("limit_disk: radius not decreasing at X = " +
                                std::to_string(res.xs[i + 1]));
        if (rx > 0.0 && std::isfinite(rx)) {
            const double drift = std::abs(res.centers[i + 1] - res.centers[i]);
            if (!(drift + ry <= rx + th.nesting_tol + 1e-12 * rx))
                throw numeric_error("limit_disk: nesting violated at X = " +
                                    std::to_string(res.xs[i + 1]));
        }
    }

    // Limit decision through the monotone energy integral E(X) behind the
    // radius 1/(2(bt + E)):  E divergent -> radius -> 0 (limit point);
    // E convergent -> positive limit radius (limit circle), with the limit
    // obtained from the geometric tail of the energy increments.
    const double rho_last = res.radii.back();
    const double log_rho_last = log_radii.back();
    const cplx ei = std::polar(1.0, eta);
    const double bt = -(ei * std::cos(pr.alpha) * std::conj(std::sin(pr.alpha))).real();

    bool decided_point = (log_rho_last <= std::log(th.limit_point_radius));

    TailVerdict verdict = TailVerdict::Inconclusive;
    if (!decided_point) {
        std::vector<double> increments;
        bool energy_overflow = false;
        for (std::size_t i = 0; i + 1 < frames.size(); ++i) {
            const double inc = (frames[i + 1].energy_phi - frames[i].energy_phi).value();
            if (!std::isfinite(inc)) energy_overflow = true;
            increments.push_back(inc);
        }
        verdict = energy_overflow ? TailVerdict::Divergent
                                  : tail_ratio_verdict(increments);
        if (verdict == TailVerdict::Divergent) decided_point = true;
        if (verdict == TailVerdict::Inconclusive)
            throw numeric_error(
                "limit_disk: energy tail inconclusive; schedule too short to classify");
    }

    if (decided_point) {
        res.kind = LimitResult::Kind::LimitPoint;
        // accelerate the center sequence; the limit point stays within the
        // last radius of the last center either way
        const std::size_t tn = std::min<std::size_t>(res.centers.size(), 6);
        const WynnResult acc =
            aitken_iterated(std::vector<cplx>(res.centers.end() - tn, res.centers.end()));
        res.m = res.centers.back();
        if (acc.ok && std::abs(acc.limit - res.centers.back()) <= 1.5 * rho_last)
            res.m = acc.limit;
        res.error_bound = std::max(rho_last, 1e-14 * (1.0 + std::abs(res.m)));
    } else {
        // convergent energy: sum the geometric tail of the increments
        const double e_last = frames.back().energy_phi.value();
        const double i_last =
            (frames[frames.size() - 1].energy_phi - frames[frames.size() - 2].energy_phi).value();
        const double i_prev =
            (frames[frames.size() - 2].energy_phi - frames[frames.size() - 3].energy_phi).value();
        const double r = (i_prev > 0.0) ? std::clamp(i_last / i_prev, 0.0, 0.95) : 0.0;
        const double tail = i_last * r / (1.0 - r);
        const double e_inf = e_last + tail;
        const double rho_inf = 1.0 / (2.0 * (bt + e_inf));
        if (!(rho_inf > 0.0) || rho_inf <= th.limit_point_radius) {
            res.kind = LimitResult::Kind::LimitPoint;
            res.m = res.centers.back();
            res.error_bound = std::max(rho_last, 1e-14 * (1.0 + std::abs(res.m)));
            return res;
        }
        res.kind = LimitResult::Kind::LimitCircle;
        const std::size_t tail_n = std::min<std::size_t>(res.centers.size(), 6);
        const WynnResult c_limit = aitken_iterated(
            std::vector<cplx>(res.centers.end() - tail_n, res.centers.end()));
        res.m = c_limit.ok ? c_limit.limit : res.centers.back();
        // radius extrapolation error: next-order correction of the tail sum
        const double rad_err = std::abs(tail) * 0.5 + 1e-12;
        res.error_bound = std::max(rad_err * 2.0 * rho_inf * rho_inf, c_limit.error);
        res.final_disk.x = res.xs.back();
        res.final_disk.lambda = lambda;
        res.final_disk.center = res.m;
        res.final_disk.radius = rho_inf;
        res.final_disk.radius_boundary_form = rho_inf;
        res.final_disk.log_radius = std::log(rho_inf);
    }
    return res;
}

// A boundary point of the limit circle, selected by angle.
inline cplx limit_circle_point(const LimitResult& r, double angle) {
    if (r.kind != LimitResult::Kind::LimitCircle)
        throw input_error("limit_circle_point: not a limit-circle result");
    return r.final_disk.center + r.final_disk.radius * std::polar(1.0, angle);
}

// ---------------------------------------------------------------------------
// Recovery of the distinguished solution psi = theta + m phi on [a, X].
//
// In the limit-point case psi is dominated by the complementary solution, so
// it is rebuilt by integrating backward from X with the logarithmic
// derivative taken from the disk map; backward, psi is the growing direction
// and the recovery is stable.  The trace is normalized to psi(a) = cos(alpha)
// + m sin(alpha), p psi'(a) = sin(alpha) - m cos(alpha).

struct PsiTrace {
    SolutionTrace trace;       // ascending in x after post-processing
    cplx m;
    double data_residual = 0;  // relative mismatch of the non-normalized component at a
};

// Index of the frame to backcast from: the deepest truncation at which the
// distinguished solution is still resolvable inside the pair (the rescaled
// pair loses it below machine precision once exp(-2 log_scale) ~ eps).
inline std::size_t pick_backcast_index(const std::vector<SolutionFrame>& frames,
                                       double max_two_sigma = 28.0) {
    bool found = false;
    std::size_t best = 0;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (2.0 * frames[i].log_scale <= max_two_sigma) {
            best = i;
            found = true;
        }
    }
    if (!found) {
        double smin = inf;
        for (std::size_t i = 0; i < frames.size(); ++i)
            if (frames[i].log_scale < smin) {
                smin = frames[i].log_scale;
                best = i;
            }
    }
    return best;
}

inline PsiTrace backcast_psi(const CoefficientProblem& pr, const cplx& lambda, double eta,
                             const SolutionFrame& frame_at_X, const cplx& m_value,
                             std::span<const double> outputs_desc,
                             const IntegrationSettings& st = {}) {
    const cplx z = mobius_z(frame_at_X, m_value);  // -p psi'(X) / psi(X)
    SolutionTrace tr = integrate_solution(pr, lambda, eta, frame_at_X.x, pr.interval.a,
                                          cplx(1.0, 0.0), -z, outputs_desc, st);

    const TracePoint& at_a = tr.pts.back();
    const cplx ca = std::cos(pr.alpha), sa = std::sin(pr.alpha);
    const cplx want_y = ca + m_value * sa;
    const cplx want_p = sa - m_value * ca;

    const ScaledComplex ya = at_a.value(), pa = at_a.momentum();
    ScaledComplex scale;
    cplx other_have, other_want;
    if (std::abs(want_y) >= std::abs(want_p)) {
        scale = ScaledComplex(want_y / ya.m, -ya.e);
        other_want = want_p;
        other_have = (ScaledComplex(pa.m, pa.e) * scale).value();
    } else {
        scale = ScaledComplex(want_p / pa.m, -pa.e);
        other_want = want_y;
        other_have = (ScaledComplex(ya.m, ya.e) * scale).value();
    }
    PsiTrace out;
    out.m = m_value;
    const double ref = std::max(std::abs(want_y), std::abs(want_p));
    out.data_residual = std::abs(other_have - other_want) / (ref > 0 ? ref : 1.0);
    tr.scale_factor = scale.m;
    tr.scale_log = scale.e;
    out.trace = std::move(tr);
    return out;
}

}  // namespace sims
