#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "sims/core.hpp"
#include "sims/problem.hpp"
#include "sims/rk45.hpp"

namespace sims {

// Values of the fundamental pair (theta, phi) at a point, jointly rescaled:
// true value = stored value * exp(log_scale).  The accumulators carry the
// rotated energy, weighted L2 mass and p-form integrals from a to x.
struct SolutionFrame {
    double x = 0.0;
    cplx theta, p_dtheta, phi, p_dphi;
    double log_scale = 0.0;

    // integral accumulators (true values, scaled storage)
    ScaledReal energy_theta, energy_phi;     // Re e^{i eta} (p|y'|^2 + (q - lambda w)|y|^2)
    ScaledReal l2w_theta, l2w_phi;           // |y|^2 w
    ScaledComplex p_form_theta, p_form_phi;  // p |y'|^2
    ScaledComplex cross_energy;              // energy cross term between theta and phi
    ScaledComplex cross_l2w;                 // L2w cross term

    // De-rescaled bracket of the pair; equals -1 along the trajectory.  The
    // measurable noise floor is eps * exp(2 log_scale): once the dominant
    // mode swamps the pair, the bracket cancels below machine precision.
    cplx wronskian() const {
        return ScaledComplex(theta * p_dphi - phi * p_dtheta, 2.0 * log_scale).value();
    }
    double wronskian_noise_floor() const {
        const double t = 2.0 * log_scale;
        return 2.2e-16 * (t > 700.0 ? inf : std::exp(std::max(t, 0.0)));
    }

    // Rotated lambda-energy of psi_l = theta + l phi over [a, x].
    ScaledReal energy_psi(const cplx& l) const {
        ScaledReal r = energy_theta + energy_phi * ScaledReal::from(std::norm(l));
        const ScaledComplex lc = cross_energy * ScaledComplex::from(l);
        return r + ScaledReal(lc.m.real(), lc.e);
    }
    ScaledReal l2w_psi(const cplx& l) const {
        ScaledReal r = l2w_theta + l2w_phi * ScaledReal::from(std::norm(l));
        const ScaledComplex lc = cross_l2w * ScaledComplex::from(l);
        return r + ScaledReal(lc.m.real(), lc.e);
    }
};

// u (p v)' - v (p u)' evaluated from function values and momenta.
inline cplx lagrange_bracket(const cplx& u, const cplx& p_du, const cplx& v, const cplx& p_dv) {
    return u * p_dv - v * p_du;
}

namespace detail {

// Renormalize a block of complex pairs when its norm leaves [0.5, 2];
// returns the log factor removed from the block (0 if none).
inline double renorm_block(double* y, std::size_t nreals) {
    double n2 = 0.0;
    for (std::size_t i = 0; i < nreals; ++i) n2 += y[i] * y[i];
    if (n2 >= 0.25 && n2 <= 4.0) return 0.0;
    if (n2 == 0.0) return 0.0;
    const double delta = 0.5 * std::log(n2);
    const double f = std::exp(-delta);
    for (std::size_t i = 0; i < nreals; ++i) y[i] *= f;
    return delta;
}

// Multiply accumulator storage by exp(-2 delta) and re-window it into
// [1e-100, 1e100] by moving excess into `off`.
inline void rescale_accumulator(double* acc, std::size_t nreals, double delta, double& off) {
    const double f = std::exp(-2.0 * delta);
    double mx = 0.0;
    for (std::size_t i = 0; i < nreals; ++i) {
        acc[i] *= f;
        mx = std::max(mx, std::abs(acc[i]));
    }
    if (mx > 1e100 || (mx > 0.0 && mx < 1e-100)) {
        const double s = std::log(mx);
        const double g = std::exp(-s);
        for (std::size_t i = 0; i < nreals; ++i) acc[i] *= g;
        off += s;
    }
}

inline cplx get(const double* y, std::size_t k) { return {y[2 * k], y[2 * k + 1]}; }
inline void put(double* y, std::size_t k, const cplx& v) {
    y[2 * k] = v.real();
    y[2 * k + 1] = v.imag();
}

// Fundamental pair plus quadrature accumulators for one spectral parameter.
struct PairSystem {
    static constexpr std::size_t dim = 20;
    // layout: [0..7] theta, p theta', phi, p phi'
    //         [8] E_theta [9] E_phi [10] W_theta [11] W_phi
    //         [12..13] P_theta [14..15] P_phi [16..17] cross E [18..19] cross W

    const CoefficientProblem* pr;
    cplx lambda;
    cplx ei_eta;
    double sigma = 0.0;
    std::array<double, 6> off{};  // E_t, E_p, W_t, W_p, P-pair(joint), cross-pair(joint)

    void rhs(double x, const double* y, double* dy) const {
        const Coeffs c = pr->evaluate_unchecked(x);
        const cplx invp = 1.0 / c.p;
        const cplx invpc = 1.0 / std::conj(c.p);
        const cplx s = c.q - lambda * c.w;

        const cplx th = get(y, 0), pth = get(y, 1), ph = get(y, 2), pph = get(y, 3);
        put(dy, 0, pth * invp);
        put(dy, 1, s * th);
        put(dy, 2, pph * invp);
        put(dy, 3, s * ph);

        const cplx pt2 = pth * std::conj(pth) * invpc;  // p |theta'|^2
        const cplx pp2 = pph * std::conj(pph) * invpc;
        const double eEt = std::exp(-off[0]), eEp = std::exp(-off[1]);
        const double eWt = std::exp(-off[2]), eWp = std::exp(-off[3]);
        const double eP = std::exp(-off[4]), eX = std::exp(-off[5]);

        dy[8] = (ei_eta * (pt2 + s * std::norm(th))).real() * eEt;
        dy[9] = (ei_eta * (pp2 + s * std::norm(ph))).real() * eEp;
        dy[10] = c.w * std::norm(th) * eWt;
        dy[11] = c.w * std::norm(ph) * eWp;
        const cplx ptc = pt2 * eP;
        const cplx ppc = pp2 * eP;
        dy[12] = ptc.real();
        dy[13] = ptc.imag();
        dy[14] = ppc.real();
        dy[15] = ppc.imag();
        const cplx cE = ei_eta * (pph * std::conj(pth) * invpc + s * ph * std::conj(th));
        const cplx cE2 = ei_eta * (pth * std::conj(pph) * invpc + s * th * std::conj(ph));
        const cplx cd = (cE + std::conj(cE2)) * eX;
        dy[16] = cd.real();
        dy[17] = cd.imag();
        const cplx cw = 2.0 * c.w * ph * std::conj(th) * eX;
        dy[18] = cw.real();
        dy[19] = cw.imag();
    }

    void after_accept(double, double* y) {
        const double delta = renorm_block(y, 8);
        if (delta == 0.0) return;
        sigma += delta;
        rescale_accumulator(y + 8, 1, delta, off[0]);
        rescale_accumulator(y + 9, 1, delta, off[1]);
        rescale_accumulator(y + 10, 1, delta, off[2]);
        rescale_accumulator(y + 11, 1, delta, off[3]);
        rescale_accumulator(y + 12, 4, delta, off[4]);
        rescale_accumulator(y + 16, 4, delta, off[5]);
    }

    SolutionFrame frame(double x, const double* y) const {
        SolutionFrame f;
        f.x = x;
        f.theta = get(y, 0);
        f.p_dtheta = get(y, 1);
        f.phi = get(y, 2);
        f.p_dphi = get(y, 3);
        f.log_scale = sigma;
        const double s2 = 2.0 * sigma;
        f.energy_theta = ScaledReal(y[8], s2 + off[0]);
        f.energy_phi = ScaledReal(y[9], s2 + off[1]);
        f.l2w_theta = ScaledReal(y[10], s2 + off[2]);
        f.l2w_phi = ScaledReal(y[11], s2 + off[3]);
        f.p_form_theta = ScaledComplex(get(y, 6), s2 + off[4]);
        f.p_form_phi = ScaledComplex(get(y, 7), s2 + off[4]);
        f.cross_energy = ScaledComplex(get(y, 8), s2 + off[5]);
        f.cross_l2w = ScaledComplex(get(y, 9), s2 + off[5]);
        return f;
    }
};

// One solution with its own accumulators; used for backward recovery of the
// distinguished solution and for extensions across truncated intervals.
struct SingleSystem {
    static constexpr std::size_t dim = 8;
    // layout: [0..3] y, p y'   [4] E  [5] W  [6..7] P

    const CoefficientProblem* pr;
    cplx lambda;
    cplx ei_eta;
    double sigma = 0.0;
    std::array<double, 3> off{};

    void rhs(double x, const double* y, double* dy) const {
        const Coeffs c = pr->evaluate_unchecked(x);
        const cplx s = c.q - lambda * c.w;
        const cplx v = get(y, 0), pv = get(y, 1);
        put(dy, 0, pv / c.p);
        put(dy, 1, s * v);
        const cplx p2 = pv * std::conj(pv) / std::conj(c.p);
        dy[4] = (ei_eta * (p2 + s * std::norm(v))).real() * std::exp(-off[0]);
        dy[5] = c.w * std::norm(v) * std::exp(-off[1]);
        const cplx pc = p2 * std::exp(-off[2]);
        dy[6] = pc.real();
        dy[7] = pc.imag();
    }

    void after_accept(double, double* y) {
        const double delta = renorm_block(y, 4);
        if (delta == 0.0) return;
        sigma += delta;
        rescale_accumulator(y + 4, 1, delta, off[0]);
        rescale_accumulator(y + 5, 1, delta, off[1]);
        rescale_accumulator(y + 6, 2, delta, off[2]);
    }
};

// Two fundamental pairs at different spectral parameters plus the four
// bilinear cross integrals  int u(.,l1) v(.,l2) w dx  (no conjugation).
struct JointPairSystem {
    static constexpr std::size_t dim = 24;
    // layout: [0..7] pair at lambda1, [8..15] pair at lambda2,
    //         [16..23] cross integrals tt, tp, pt, pp

    const CoefficientProblem* pr;
    cplx lambda1, lambda2;
    double sigma = 0.0;
    double off = 0.0;

    void rhs(double x, const double* y, double* dy) const {
        const Coeffs c = pr->evaluate_unchecked(x);
        const cplx invp = 1.0 / c.p;
        const cplx s1 = c.q - lambda1 * c.w;
        const cplx s2 = c.q - lambda2 * c.w;
        const cplx t1 = get(y, 0), pt1 = get(y, 1), f1 = get(y, 2), pf1 = get(y, 3);
        const cplx t2 = get(y, 4), pt2 = get(y, 5), f2 = get(y, 6), pf2 = get(y, 7);
        put(dy, 0, pt1 * invp);
        put(dy, 1, s1 * t1);
        put(dy, 2, pf1 * invp);
        put(dy, 3, s1 * f1);
        put(dy, 4, pt2 * invp);
        put(dy, 5, s2 * t2);
        put(dy, 6, pf2 * invp);
        put(dy, 7, s2 * f2);
        const double e = std::exp(-off) * c.w;
        put(dy, 8, t1 * t2 * e);
        put(dy, 9, t1 * f2 * e);
        put(dy, 10, f1 * t2 * e);
        put(dy, 11, f1 * f2 * e);
    }

    void after_accept(double, double* y) {
        const double delta = renorm_block(y, 16);
        if (delta == 0.0) return;
        sigma += delta;
        rescale_accumulator(y + 16, 8, delta, off);
    }
};

// Two single solutions at different spectral parameters plus int y1 y2 w dx.
struct JointSingleSystem {
    static constexpr std::size_t dim = 10;

    const CoefficientProblem* pr;
    cplx lambda1, lambda2;
    double sigma = 0.0;
    double off = 0.0;

    void rhs(double x, const double* y, double* dy) const {
        const Coeffs c = pr->evaluate_unchecked(x);
        const cplx invp = 1.0 / c.p;
        const cplx v1 = get(y, 0), pv1 = get(y, 1), v2 = get(y, 2), pv2 = get(y, 3);
        put(dy, 0, pv1 * invp);
        put(dy, 1, (c.q - lambda1 * c.w) * v1);
        put(dy, 2, pv2 * invp);
        put(dy, 3, (c.q - lambda2 * c.w) * v2);
        put(dy, 4, v1 * v2 * c.w * std::exp(-off));
    }

    void after_accept(double, double* y) {
        const double delta = renorm_block(y, 8);
        if (delta == 0.0) return;
        sigma += delta;
        rescale_accumulator(y + 8, 2, delta, off);
    }
};

}  // namespace detail

// ---------------------------------------------------------------------------

// Fundamental system with data  theta(a) = cos(alpha), p theta'(a) = sin(alpha),
// phi(a) = sin(alpha), p phi'(a) = -cos(alpha),  integrated with joint
// renormalization and in-line quadratures.  Frames are produced exactly at
// `outputs` (ascending, inside [a, b)).
inline std::vector<SolutionFrame> integrate_pair(const CoefficientProblem& pr, const cplx& lambda,
                                                 double eta, const cplx& /*K*/,
                                                 std::span<const double> outputs,
                                                 const IntegrationSettings& st = {}) {
    if (outputs.empty()) return {};
    if (!(outputs.back() < pr.interval.b)) throw input_error("integrate_pair: output beyond b");

    detail::PairSystem sys{&pr, lambda, std::polar(1.0, eta)};
    std::array<double, detail::PairSystem::dim> y{};
    const cplx ca = std::cos(pr.alpha), sa = std::sin(pr.alpha);
    detail::put(y.data(), 0, ca);
    detail::put(y.data(), 1, sa);
    detail::put(y.data(), 2, sa);
    detail::put(y.data(), 3, -ca);

    std::vector<SolutionFrame> frames;
    frames.reserve(outputs.size());
    rk45_integrate(sys, pr.interval.a, outputs.back(), y.data(), outputs, st,
                   [&](double x, const double* yy) { frames.push_back(sys.frame(x, yy)); });
    return frames;
}

// One solution from arbitrary data, either direction of travel.
struct TracePoint {
    double x = 0.0;
    cplx y, p_dy;
    double log_scale = 0.0;
    ScaledReal energy;  // signed integral from the start point to x
    ScaledReal l2w;
    ScaledComplex p_form;

    ScaledComplex value() const { return ScaledComplex(y, log_scale); }
    ScaledComplex momentum() const { return ScaledComplex(p_dy, log_scale); }
};

struct SolutionTrace {
    std::vector<TracePoint> pts;
    cplx lambda;
    double eta = 0.0;
    cplx scale_factor{1.0, 0.0};  // multiply stored values by this for the target normalization
    double scale_log = 0.0;
};

inline SolutionTrace integrate_solution(const CoefficientProblem& pr, const cplx& lambda,
                                        double eta, double x_from, double x_to, const cplx& y0,
                                        const cplx& p_dy0, std::span<const double> outputs,
                                        const IntegrationSettings& st = {}) {
    detail::SingleSystem sys{&pr, lambda, std::polar(1.0, eta)};
    std::array<double, detail::SingleSystem::dim> y{};
    detail::put(y.data(), 0, y0);
    detail::put(y.data(), 1, p_dy0);
    SolutionTrace tr;
    tr.lambda = lambda;
    tr.eta = eta;
    tr.pts.reserve(outputs.size());
    rk45_integrate(sys, x_from, x_to, y.data(), outputs, st, [&](double x, const double* yy) {
        TracePoint p;
        p.x = x;
        p.y = detail::get(yy, 0);
        p.p_dy = detail::get(yy, 1);
        p.log_scale = sys.sigma;
        const double s2 = 2.0 * sys.sigma;
        p.energy = ScaledReal(yy[4], s2 + sys.off[0]);
        p.l2w = ScaledReal(yy[5], s2 + sys.off[1]);
        p.p_form = ScaledComplex(detail::get(yy, 3), s2 + sys.off[2]);
        tr.pts.push_back(p);
    });
    return tr;
}

// Cross integrals  int_a^x u(.,l1) v(.,l2) w dt  for u, v in {theta, phi}.
struct CrossIntegrals {
    double x = 0.0;
    cplx theta_theta, theta_phi, phi_theta, phi_phi;
    SolutionFrame frame1, frame2;  // pair frames of both parameters at x
};

inline std::vector<CrossIntegrals> integrate_joint_pair(const CoefficientProblem& pr,
                                                        const cplx& lambda1, const cplx& lambda2,
                                                        std::span<const double> outputs,
                                                        const IntegrationSettings& st = {}) {
    detail::JointPairSystem sys{&pr, lambda1, lambda2};
    std::array<double, detail::JointPairSystem::dim> y{};
    const cplx ca = std::cos(pr.alpha), sa = std::sin(pr.alpha);
    for (int b = 0; b < 2; ++b) {
        detail::put(y.data(), 4 * b + 0, ca);
        detail::put(y.data(), 4 * b + 1, sa);
        detail::put(y.data(), 4 * b + 2, sa);
        detail::put(y.data(), 4 * b + 3, -ca);
    }
    std::vector<CrossIntegrals> out;
    out.reserve(outputs.size());
    rk45_integrate(sys, pr.interval.a, outputs.back(), y.data(), outputs, st,
                   [&](double x, const double* yy) {
                       CrossIntegrals ci;
                       ci.x = x;
                       const double e = 2.0 * sys.sigma + sys.off;
                       ci.theta_theta = ScaledComplex(detail::get(yy, 8), e).value();
                       ci.theta_phi = ScaledComplex(detail::get(yy, 9), e).value();
                       ci.phi_theta = ScaledComplex(detail::get(yy, 10), e).value();
                       ci.phi_phi = ScaledComplex(detail::get(yy, 11), e).value();
                       SolutionFrame f1, f2;
                       f1.x = f2.x = x;
                       f1.theta = detail::get(yy, 0);
                       f1.p_dtheta = detail::get(yy, 1);
                       f1.phi = detail::get(yy, 2);
                       f1.p_dphi = detail::get(yy, 3);
                       f1.log_scale = sys.sigma;
                       f2.theta = detail::get(yy, 4);
                       f2.p_dtheta = detail::get(yy, 5);
                       f2.phi = detail::get(yy, 6);
                       f2.p_dphi = detail::get(yy, 7);
                       f2.log_scale = sys.sigma;
                       ci.frame1 = f1;
                       ci.frame2 = f2;
                       out.push_back(ci);
                   });
    return out;
}

// Signed cumulative  int y1 y2 w  along the direction of travel, for two
// solutions given by data at x_from.  Used backward from a truncation point.
struct JointSingleResult {
    std::vector<double> xs;
    std::vector<cplx> cumulative;          // integral from x_from to xs[k]
    std::vector<std::array<cplx, 4>> vals; // y1, p y1', y2, p y2' (rescaled)
    std::vector<double> log_scales;
};

inline JointSingleResult integrate_joint_single(const CoefficientProblem& pr, const cplx& lambda1,
                                                const cplx& lambda2, double x_from, double x_to,
                                                const std::array<cplx, 4>& data,
                                                std::span<const double> outputs,
                                                const IntegrationSettings& st = {}) {
    detail::JointSingleSystem sys{&pr, lambda1, lambda2};
    std::array<double, detail::JointSingleSystem::dim> y{};
    for (int k = 0; k < 4; ++k) detail::put(y.data(), k, data[k]);
    JointSingleResult out;
    rk45_integrate(sys, x_from, x_to, y.data(), outputs, st, [&](double x, const double* yy) {
        out.xs.push_back(x);
        out.cumulative.push_back(
            ScaledComplex(detail::get(yy, 4), 2.0 * sys.sigma + sys.off).value());
        out.vals.push_back({detail::get(yy, 0), detail::get(yy, 1), detail::get(yy, 2),
                            detail::get(yy, 3)});
        out.log_scales.push_back(sys.sigma);
    });
    return out;
}

// Rotated energy with K in place of lambda:
//   E_K = E_lambda + Re[e^{i eta}(lambda - K)] * int |y|^2 w.
inline ScaledReal energy_with_k(const ScaledReal& energy_lambda, const ScaledReal& l2w,
                                const cplx& lambda, const cplx& K, double eta) {
    const double shift = (std::polar(1.0, eta) * (lambda - K)).real();
    return energy_lambda + l2w * ScaledReal::from(shift);
}

}  // namespace sims
