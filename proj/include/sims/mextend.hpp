#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sims/gammafn.hpp"
#include "sims/odecore.hpp"
#include "sims/problem.hpp"
#include "sims/rangegeom.hpp"
#include "sims/seq.hpp"
#include "sims/weyl.hpp"

namespace sims {

enum class MRoute { DiskLimit, Continue34, Continue38, ResolventExtend, ClosedForm };

inline const char* m_route_name(MRoute r) {
    switch (r) {
        case MRoute::DiskLimit: return "disk-limit";
        case MRoute::Continue34: return "continue-bilinear";
        case MRoute::Continue38: return "continue-truncated";
        case MRoute::ResolventExtend: return "resolvent-extend";
        case MRoute::ClosedForm: return "closed-form";
    }
    return "?";
}

struct MSample {
    cplx lambda;
    cplx m;
    double eta = 0.0;
    cplx K;
    double error_bound = 0.0;
    MRoute route = MRoute::DiskLimit;
};

inline MSample m_from_disk_limit(const CoefficientProblem& pr, double eta, const cplx& K,
                                 const cplx& lambda, const TruncationSchedule& sched,
                                 const LimitThresholds& th = {},
                                 const IntegrationSettings& st = {}) {
    const LimitResult r = limit_disk(pr, eta, K, lambda, sched, th, st);
    MSample s;
    s.lambda = lambda;
    s.m = r.m;
    s.eta = eta;
    s.K = K;
    s.error_bound = r.error_bound;
    s.route = MRoute::DiskLimit;
    return s;
}

// ---------------------------------------------------------------------------
// Closed forms.

// m for the sector problem -y'' + c x^2 y with the Neumann-type boundary
// data (alpha = pi/2): a ratio of Gamma values.  Roots carry the branch
// r^{1/n} e^{i theta/n}, theta in [0, 2 pi).  For arg c = pi the two
// boundary functions (upper/lower half-plane) are distinct; they are not
// analytic continuations of each other and are kept separate.
inline cplx oscillator_m_closed_form(const cplx& c, const cplx& lambda) {
    const double argc = arg_02pi(c);
    if (!(argc <= pi + 1e-12))
        throw input_error("oscillator_m_closed_form: requires arg c in [0, pi]");

    auto value = [](const cplx& cc, const cplx& l) {
        const cplx rc = sqrt_branch(cc);
        const cplx a = 0.25 - l / (4.0 * rc);
        const cplx b = 0.75 - l / (4.0 * rc);
        if (a.imag() == 0.0 && a.real() <= 0.0 &&
            std::abs(a.real() - std::round(a.real())) < 1e-12)
            throw input_error("oscillator_m_closed_form: lambda at a pole (4n+1) sqrt(c)");
        return -1.0 / (2.0 * root_branch(cc, 4)) * complex_gamma(a) / complex_gamma(b);
    };

    if (std::abs(argc - pi) < 1e-12) {
        if (lambda.imag() > 0.0) return value(c, lambda);
        if (lambda.imag() < 0.0) return std::conj(value(c, std::conj(lambda)));
        throw input_error(
            "oscillator_m_closed_form: real lambda lies between the two boundary branches");
    }
    return value(c, lambda);
}

// Boundary-parameter transform between the Neumann-type function and a
// general alpha.
inline cplx alpha_transform(const cplx& m_half_pi, const cplx& alpha) {
    const cplx ca = std::cos(alpha), sa = std::sin(alpha);
    const cplx den = m_half_pi * ca + sa;
    if (std::abs(den) < 1e-14 * (1.0 + std::abs(m_half_pi)))
        throw numeric_error("alpha_transform: boundary coincidence (denominator ~ 0)");
    return (m_half_pi * sa - ca) / den;
}

// ---------------------------------------------------------------------------
// Distinguished-solution product integral  int psi(.,l1) psi(.,l2) w  with a
// geometric tail estimate; both solutions are recovered backward.

struct PsiProductIntegral {
    cplx value;
    double tail_estimate = 0.0;
    double error = 0.0;
    cplx m1, m2;
};

inline PsiProductIntegral psi_product_integral(const CoefficientProblem& pr, double eta,
                                               const cplx& K, const cplx& l1, const cplx& l2,
                                               const TruncationSchedule& sched,
                                               const LimitThresholds& th = {},
                                               const IntegrationSettings& st = {}) {
    const LimitResult r1 = limit_disk(pr, eta, K, l1, sched, th, st);
    const LimitResult r2 = limit_disk(pr, eta, K, l2, sched, th, st);
    if (r1.kind != LimitResult::Kind::LimitPoint || r2.kind != LimitResult::Kind::LimitPoint)
        throw input_error("psi_product_integral: needs the limit-point case at both parameters");

    const auto f1 = integrate_pair(pr, l1, eta, K, sched.points, st);
    const auto f2 = integrate_pair(pr, l2, eta, K, sched.points, st);
    const std::size_t bi = std::min(pick_backcast_index(f1), pick_backcast_index(f2));
    const double xb = sched.points[bi];

    const cplx z1 = mobius_z(f1[bi], r1.m);
    const cplx z2 = mobius_z(f2[bi], r2.m);

    const double a = pr.interval.a;
    std::vector<double> desc;
    const int m = 16;
    for (int k = 0; k <= m; ++k) desc.push_back(a + (xb - a) * std::pow(0.005, k / double(m)));
    desc.push_back(a);

    const auto joint = integrate_joint_single(pr, l1, l2, xb, a,
                                              {cplx(1.0, 0.0), -z1, cplx(1.0, 0.0), -z2}, desc, st);

    // normalization of both solutions from their data at a
    const cplx ca = std::cos(pr.alpha), sa = std::sin(pr.alpha);
    auto norm_factor = [&](const cplx& mval, const cplx& ya, const cplx& pa,
                           double logsc) -> ScaledComplex {
        const cplx want_y = ca + mval * sa;
        const cplx want_p = sa - mval * ca;
        if (std::abs(want_y) >= std::abs(want_p))
            return ScaledComplex(want_y / ya, -logsc);
        return ScaledComplex(want_p / pa, -logsc);
    };
    const auto& last = joint.vals.back();
    const double logsc = joint.log_scales.back();
    const ScaledComplex g1 = norm_factor(r1.m, last[0], last[1], logsc);
    const ScaledComplex g2 = norm_factor(r2.m, last[2], last[3], logsc);

    PsiProductIntegral out;
    out.m1 = r1.m;
    out.m2 = r2.m;

    // cumulative runs from xb downward; the full integral over [a, xb] is the
    // last value (negate for orientation)
    const cplx raw = -joint.cumulative.back();
    const cplx scale = (g1 * g2).value();
    out.value = raw * scale;

    // geometric tail beyond xb from the first backward increments
    const cplx inc0 = -(joint.cumulative[1] - joint.cumulative[0]);
    const cplx inc1 = -(joint.cumulative[2] - joint.cumulative[1]);
    const double i0 = std::abs(inc0) * std::abs(scale), i1 = std::abs(inc1) * std::abs(scale);
    if (i1 > 0.0 && i0 < 0.9 * i1) {
        const double r = i0 / i1;
        out.tail_estimate = i0 * r / (1.0 - r);
    } else {
        out.tail_estimate = i0;  // no decay visible: conservative
    }
    out.error = out.tail_estimate + (r1.error_bound + r2.error_bound) * std::abs(out.value);
    return out;
}

// Residual of the difference identity
//   (l2 - l1) int psi(.,l1) psi(.,l2) w = m(l1) - m(l2).
inline double m_difference_residual(const CoefficientProblem& pr, double eta, const cplx& K,
                                    const cplx& l1, const cplx& l2,
                                    const TruncationSchedule& sched,
                                    const LimitThresholds& th = {},
                                    const IntegrationSettings& st = {}) {
    if (l1 == l2) return 0.0;
    const PsiProductIntegral ip = psi_product_integral(pr, eta, K, l1, l2, sched, th, st);
    return std::abs((l2 - l1) * ip.value - (ip.m1 - ip.m2));
}

// ---------------------------------------------------------------------------
// Meromorphic continuation from a sample via the bilinear integrals
// (valid when theta and phi have finite weighted mass: the non-limit-point-I
// configurations).

struct ContinuationDiagnostics {
    cplx denominator;
    double num_error = 0.0, den_error = 0.0;
};

inline MSample continue_m(const CoefficientProblem& pr, double eta, const cplx& K,
                          const MSample& anchor, const cplx& lambda,
                          const TruncationSchedule& sched, const IntegrationSettings& st = {},
                          ContinuationDiagnostics* diag = nullptr,
                          bool check_preconditions = true) {
    if (check_preconditions) {
        const auto fr = integrate_pair(pr, anchor.lambda, eta, K, sched.points, st);
        std::vector<double> th_inc, ph_inc;
        for (std::size_t i = 0; i + 1 < fr.size(); ++i) {
            th_inc.push_back((fr[i + 1].l2w_theta - fr[i].l2w_theta).value());
            ph_inc.push_back((fr[i + 1].l2w_phi - fr[i].l2w_phi).value());
        }
        if (tail_ratio_verdict(th_inc) != TailVerdict::Convergent ||
            tail_ratio_verdict(ph_inc) != TailVerdict::Convergent)
            throw input_error(
                "continue_m: fundamental pair not of finite weighted mass (limit-point I?)");
    }

    const auto cross = integrate_joint_pair(pr, lambda, anchor.lambda, sched.points, st);
    std::vector<cplx> num_sums, den_sums;
    for (const auto& ci : cross) {
        num_sums.push_back(ci.theta_theta + anchor.m * ci.theta_phi);
        den_sums.push_back(ci.phi_theta + anchor.m * ci.phi_phi);
    }
    const WynnResult inum = wynn_epsilon(num_sums);
    const WynnResult iden = wynn_epsilon(den_sums);

    const cplx dl = lambda - anchor.lambda;
    const cplx den = 1.0 + dl * iden.limit;
    if (diag) {
        diag->denominator = den;
        diag->num_error = inum.error;
        diag->den_error = iden.error;
    }
    const double den_floor = 1e-8 * (1.0 + std::abs(dl * iden.limit));
    if (std::abs(den) < den_floor)
        throw numeric_error("continue_m: denominator vanishes (pole of the continuation)");

    MSample out;
    out.lambda = lambda;
    out.m = (anchor.m - dl * inum.limit) / den;
    out.eta = eta;
    out.K = K;
    out.route = MRoute::Continue34;
    out.error_bound = (std::abs(dl) * inum.error + std::abs(out.m) * std::abs(dl) * iden.error +
                       anchor.error_bound * (1.0 + std::abs(out.m) * std::abs(dl))) /
                      std::abs(den);
    return out;
}

// ---------------------------------------------------------------------------
// Continuation through a truncated interval [c, b): the distinguished
// solution of the truncated problem is extended back to a, and m is the
// boundary Moebius ratio of its data at a.  Scale-invariant throughout.

struct TruncatedExtension {
    cplx num, den;       // numerator and denominator of the Moebius ratio (rescaled)
    cplx m_c;            // truncated-problem limit point
    double rho_c = 0.0;  // its radius bound
    double eta_c = 0.0;
    cplx K_c;
};

inline TruncatedExtension extend_from_truncated(const CoefficientProblem& pr, const cplx& alpha,
                                                double c, const cplx& lambda,
                                                const TruncationSchedule& sub_sched,
                                                const LimitThresholds& th = {},
                                                const IntegrationSettings& st = {},
                                                const ConvexRegion* region_c_hint = nullptr) {
    const CoefficientProblem prc = pr.restricted(c).with_alpha(alpha);
    ConvexRegion region_local;
    const ConvexRegion* region_c = region_c_hint;
    if (!region_c) {
        region_local = build_region(prc);
        region_c = &region_local;
    }
    if (q_alpha_member(*region_c, alpha, lambda))
        throw input_error("extend_from_truncated: lambda lies in the truncated enclosure set");
    const RotationPair pc = admissible_pair_for_alpha(*region_c, alpha, lambda);

    const LimitResult lim = limit_disk(prc, pc.eta, pc.K, lambda, sub_sched, th, st);
    if (lim.kind != LimitResult::Kind::LimitPoint)
        throw numeric_error("extend_from_truncated: truncated problem is not limit point");

    const auto frames = integrate_pair(prc, lambda, pc.eta, pc.K, sub_sched.points, st);
    const std::size_t bi = pick_backcast_index(frames);
    const cplx z = mobius_z(frames[bi], lim.m);

    // extend backward across c down to a on the full problem
    std::vector<double> desc;
    const double xb = frames[bi].x;
    const int mpts = 12;
    for (int k = 0; k <= mpts; ++k)
        desc.push_back(pr.interval.a + (xb - pr.interval.a) * std::pow(0.002, k / double(mpts)));
    desc.push_back(pr.interval.a);
    const SolutionTrace tr = integrate_solution(pr, lambda, pc.eta, xb, pr.interval.a,
                                                cplx(1.0, 0.0), -z, desc, st);

    const cplx ya = tr.pts.back().y;       // rescaled; the ratio below is scale-free
    const cplx pa = tr.pts.back().p_dy;
    const cplx ca = std::cos(alpha), sa = std::sin(alpha);

    TruncatedExtension out;
    out.num = sa * ya - ca * pa;
    out.den = ca * ya + sa * pa;
    out.m_c = lim.m;
    out.rho_c = lim.error_bound;
    out.eta_c = pc.eta;
    out.K_c = pc.K;
    return out;
}

inline MSample continue_m_case1(const CoefficientProblem& pr, const cplx& alpha, double c,
                                const cplx& lambda, const TruncationSchedule& sub_sched,
                                const LimitThresholds& th = {},
                                const IntegrationSettings& st = {}) {
    const TruncatedExtension ext = extend_from_truncated(pr, alpha, c, lambda, sub_sched, th, st);
    const double scale = std::abs(ext.num) + std::abs(ext.den);
    if (std::abs(ext.den) < 1e-10 * scale)
        throw numeric_error("continue_m_case1: denominator vanishes (pole of the extension)");
    MSample out;
    out.lambda = lambda;
    out.m = ext.num / ext.den;
    out.eta = ext.eta_c;
    out.K = ext.K_c;
    out.route = MRoute::Continue38;
    out.error_bound = ext.rho_c * (1.0 + std::norm(out.m)) / std::abs(ext.den) * scale * 1e-1 +
                      1e-12 * (1.0 + std::abs(out.m));
    return out;
}

// ---------------------------------------------------------------------------
// Pole location by the argument principle on rectangles.

struct PoleRecord {
    cplx location;
    int order = 0;
    double residual = 0.0;  // distance of the winding integral from an integer
};

struct Rect {
    double x0, y0, x1, y1;
    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
};

namespace detail_poles {

// Adaptive winding number of f along the segment [za, zb]; inserts points
// until consecutive phase jumps are below pi/2.
inline double arg_change(const std::function<cplx(const cplx&)>& f, const cplx& za,
                         const cplx& zb, cplx fa, cplx fb, int depth) {
    const double d = std::arg(fb / fa);
    if (std::abs(d) < pi / 2.0 || depth >= 14) {
        if (depth >= 14 && std::abs(d) >= pi / 2.0)
            throw numeric_error("pole_scan: phase resolution exhausted on a contour");
        return d;
    }
    const cplx zm = 0.5 * (za + zb);
    const cplx fm = f(zm);
    if (std::abs(fm) == 0.0) throw numeric_error("pole_scan: zero on contour");
    return arg_change(f, za, zm, fa, fm, depth + 1) + arg_change(f, zm, zb, fm, fb, depth + 1);
}

inline double winding(const std::function<cplx(const cplx&)>& f, const Rect& r,
                      int base_pts = 8) {
    std::vector<cplx> pts;
    for (int k = 0; k < base_pts; ++k)
        pts.push_back({r.x0 + (r.x1 - r.x0) * k / base_pts, r.y0});
    for (int k = 0; k < base_pts; ++k)
        pts.push_back({r.x1, r.y0 + (r.y1 - r.y0) * k / base_pts});
    for (int k = 0; k < base_pts; ++k)
        pts.push_back({r.x1 - (r.x1 - r.x0) * k / base_pts, r.y1});
    for (int k = 0; k < base_pts; ++k)
        pts.push_back({r.x0, r.y1 - (r.y1 - r.y0) * k / base_pts});
    std::vector<cplx> vals(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) {
        vals[k] = f(pts[k]);
        if (std::abs(vals[k]) == 0.0) throw numeric_error("pole_scan: zero on contour");
    }
    double total = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const std::size_t j = (k + 1) % pts.size();
        total += arg_change(f, pts[k], pts[j], vals[k], vals[j], 0);
    }
    return total / (2.0 * pi);
}

inline double winding_nudged(const std::function<cplx(const cplx&)>& f, Rect r, double scale) {
    for (int attempt = 0; attempt < 4; ++attempt) {
        try {
            return winding(f, r);
        } catch (const numeric_error&) {
            const double eps = scale * 3.1e-3 * (attempt + 1);
            r = {r.x0 - eps, r.y0 - eps * 0.7, r.x1 + eps * 0.9, r.y1 + eps * 1.3};
        }
    }
    return winding(f, r);  // final attempt; propagate failure
}

}  // namespace detail_poles

// Zeros of an analytic denominator located by quadtree subdivision of the
// winding number, then polished by a secant/Newton iteration and certified
// by a small winding circle.  Zeros of `den` are the reported poles.
inline std::vector<PoleRecord> scan_denominator_zeros(
    const std::function<cplx(const cplx&)>& den, const Rect& rect, int grid = 4,
    double locate_tol = 1e-6) {
    std::vector<PoleRecord> out;
    std::vector<Rect> work;
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j)
            work.push_back({rect.x0 + rect.width() * i / grid, rect.y0 + rect.height() * j / grid,
                            rect.x0 + rect.width() * (i + 1) / grid,
                            rect.y0 + rect.height() * (j + 1) / grid});

    const double scale = std::max(rect.width(), rect.height());
    while (!work.empty()) {
        const Rect r = work.back();
        work.pop_back();
        const double w = detail_poles::winding_nudged(den, r, scale * 1e-3);
        const int wi = static_cast<int>(std::lround(w));
        if (wi == 0) continue;
        const double sz = std::max(r.width(), r.height());
        if (sz > 0.05 || (wi > 1 && sz > std::max(locate_tol, 1e-9))) {
            const double mx = 0.5 * (r.x0 + r.x1), my = 0.5 * (r.y0 + r.y1);
            work.push_back({r.x0, r.y0, mx, my});
            work.push_back({mx, r.y0, r.x1, my});
            work.push_back({r.x0, my, mx, r.y1});
            work.push_back({mx, my, r.x1, r.y1});
            continue;
        }
        if (wi > 1) {
            // a genuinely multiple zero: report the cell centre with the
            // winding count as the multiplicity
            PoleRecord p;
            p.location = {0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1)};
            p.order = wi;
            p.residual = std::abs(w - wi);
            out.push_back(p);
            continue;
        }

        // secant/Newton polish from the cell centre
        cplx z = {0.5 * (r.x0 + r.x1), 0.5 * (r.y0 + r.y1)};
        const double h = 1e-6 * std::max(1.0, std::abs(z));
        bool converged = false;
        for (int it = 0; it < 60; ++it) {
            const cplx fz = den(z);
            const cplx dfz = (den(z + h) - den(z - h)) / (2.0 * h);
            if (std::abs(dfz) == 0.0) break;
            const cplx step = fz / dfz;
            z -= step;
            if (std::abs(step) < locate_tol * 1e-3) {
                converged = true;
                break;
            }
            if (std::abs(step) > 2.0 * sz) break;  // left the cell: fall back
        }
        if (!converged) {
            // fall back to bisection via subdivision
            const double mx = 0.5 * (r.x0 + r.x1), my = 0.5 * (r.y0 + r.y1);
            if (std::max(r.width(), r.height()) < locate_tol) {
                PoleRecord p;
                p.location = {mx, my};
                p.order = wi;
                p.residual = std::abs(w - wi);
                out.push_back(p);
                continue;
            }
            work.push_back({r.x0, r.y0, mx, my});
            work.push_back({mx, r.y0, r.x1, my});
            work.push_back({r.x0, my, mx, r.y1});
            work.push_back({mx, my, r.x1, r.y1});
            continue;
        }

        // certify with a small circle: winding = order
        const double rad = std::max(locate_tol, 4.0 * h);
        const Rect cell{z.real() - rad, z.imag() - rad, z.real() + rad, z.imag() + rad};
        const double wc = detail_poles::winding_nudged(den, cell, rad);
        PoleRecord p;
        p.location = z;
        p.order = static_cast<int>(std::lround(wc));
        p.residual = std::abs(wc - std::lround(wc));
        if (p.order >= 1) out.push_back(p);
    }

    // dedupe and deterministic order
    std::sort(out.begin(), out.end(), [](const PoleRecord& a, const PoleRecord& b) {
        if (a.location.real() != b.location.real())
            return a.location.real() < b.location.real();
        return a.location.imag() < b.location.imag();
    });
    std::vector<PoleRecord> uniq;
    for (const auto& p : out) {
        if (!uniq.empty() && std::abs(p.location - uniq.back().location) < 10.0 * locate_tol)
            continue;
        uniq.push_back(p);
    }
    return uniq;
}

// Route selection for the pole scan.
enum class PoleRoute { TruncatedExtension, BilinearContinuation };

struct PoleScanOptions {
    int grid = 4;
    double locate_tol = 1e-5;
    double truncation_c = 0.0;      // 0 = automatic
    cplx anchor_lambda{0.0, 0.0};   // 0 = automatic (bilinear route)
    int sub_sched_count = 8;
    double sub_sched_ratio = 1.7;
};

inline std::vector<PoleRecord> pole_scan(const CoefficientProblem& pr, const Rect& rect,
                                         PoleRoute route, const PoleScanOptions& opt = {},
                                         const IntegrationSettings& st = {}) {
    if (rect.width() <= 0.0 || rect.height() <= 0.0) return {};

    if (route == PoleRoute::TruncatedExtension) {
        // choose c so that the rectangle clears the truncated enclosure set
        double c = opt.truncation_c;
        std::vector<cplx> corners = {{rect.x0, rect.y0}, {rect.x1, rect.y0},
                                     {rect.x0, rect.y1}, {rect.x1, rect.y1},
                                     {0.5 * (rect.x0 + rect.x1), rect.y1},
                                     {0.5 * (rect.x0 + rect.x1), rect.y0}};
        auto clears = [&](double cc) {
            const CoefficientProblem prc = pr.restricted(cc);
            const ConvexRegion rc = build_region(prc);
            for (const cplx& z : corners)
                if (q_alpha_member(rc, pr.alpha, z)) return false;
            return true;
        };
        if (c == 0.0) {
            for (double cand = std::max(1.0, pr.interval.a + 1.0);; cand *= 1.5) {
                if (cand > 1e6) throw numeric_error("pole_scan: no clearing truncation found");
                if (clears(cand)) {
                    c = cand;
                    break;
                }
            }
        }
        const CoefficientProblem prc = pr.restricted(c);
        const ConvexRegion region_c = build_region(prc);
        const auto sub_sched = make_schedule(prc.interval, std::max(2.0 * c, c + 1.0),
                                             opt.sub_sched_ratio, opt.sub_sched_count);
        LimitThresholds th;
        auto den = [&, c](const cplx& lambda) -> cplx {
            const TruncatedExtension ext =
                extend_from_truncated(pr, pr.alpha, c, lambda, sub_sched, th, st, &region_c);
            const double scale = std::abs(ext.num) + std::abs(ext.den);
            if (scale == 0.0) throw numeric_error("pole_scan: degenerate extension data");
            return ext.den / scale;  // scale-free: winding unaffected
        };
        return scan_denominator_zeros(den, rect, opt.grid, opt.locate_tol);
    }

    // bilinear-continuation route
    cplx anchor_lambda = opt.anchor_lambda;
    const ConvexRegion region = build_region(pr);
    if (anchor_lambda == cplx(0.0, 0.0)) {
        const std::vector<cplx> candidates = {{0.0, 2.0},  {0.0, -2.0}, {-3.0, 1.0},
                                              {-3.0, -1.0}, {2.0, 3.0},  {2.0, -3.0}};
        bool found = false;
        for (const cplx& cand : candidates) {
            try {
                (void)admissible_pair_for_alpha(region, pr.alpha, cand);
                anchor_lambda = cand;
                found = true;
                break;
            } catch (const std::exception&) {
            }
        }
        if (!found) throw input_error("pole_scan: no admissible anchor found automatically");
    }
    const RotationPair pair = admissible_pair_for_alpha(region, pr.alpha, anchor_lambda);
    const auto sched = make_schedule(pr.interval, std::max(2.0, pr.interval.a + 1.0),
                                     opt.sub_sched_ratio, opt.sub_sched_count);
    const MSample anchor =
        m_from_disk_limit(pr, pair.eta, pair.K, anchor_lambda, sched, LimitThresholds{}, st);

    auto den = [&](const cplx& lambda) -> cplx {
        const auto cross = integrate_joint_pair(pr, lambda, anchor.lambda, sched.points, st);
        std::vector<cplx> den_sums;
        for (const auto& ci : cross)
            den_sums.push_back(ci.phi_theta + anchor.m * ci.phi_phi);
        const WynnResult iden = wynn_epsilon(den_sums);
        return 1.0 + (lambda - anchor.lambda) * iden.limit;
    };
    return scan_denominator_zeros(den, rect, opt.grid, opt.locate_tol);
}

}  // namespace sims
