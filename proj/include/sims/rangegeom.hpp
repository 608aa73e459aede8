#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "sims/core.hpp"
#include "sims/problem.hpp"

namespace sims {

namespace geom {

inline double cross(const cplx& o, const cplx& a, const cplx& b) {
    return (a.real() - o.real()) * (b.imag() - o.imag()) -
           (a.imag() - o.imag()) * (b.real() - o.real());
}

// Andrew monotone chain; returns the hull in counter-clockwise order.
inline std::vector<cplx> convex_hull(std::vector<cplx> pts) {
    std::sort(pts.begin(), pts.end(), [](const cplx& l, const cplx& r) {
        return l.real() < r.real() || (l.real() == r.real() && l.imag() < r.imag());
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const cplx& l, const cplx& r) {
                              return l.real() == r.real() && l.imag() == r.imag();
                          }),
              pts.end());
    const std::size_t n = pts.size();
    if (n <= 2) return pts;
    std::vector<cplx> h(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    return h;
}

inline double dot(const cplx& z, const cplx& u) {
    return z.real() * u.real() + z.imag() * u.imag();
}

}  // namespace geom

// Closed convex set represented as hull(vertices) + cone(recession_dirs).
// The hull is sampled from below; membership and support queries are exact
// for the stored data.
struct ConvexRegion {
    enum class Kind { HullCone, WholePlane, Empty };
    Kind kind = Kind::HullCone;
    std::vector<cplx> vertices;        // convex position, CCW
    std::vector<cplx> recession_dirs;  // unit generators of the recession cone

    bool empty() const { return kind == Kind::Empty; }
    bool whole_plane() const { return kind == Kind::WholePlane; }

    // sup over the region of <z, u>; +inf when the cone admits u.
    double support(const cplx& u, double dir_tol = 1e-9) const {
        if (kind == Kind::Empty) return -inf;
        if (kind == Kind::WholePlane) return inf;
        for (const cplx& d : recession_dirs)
            if (geom::dot(d, u) > dir_tol) return inf;
        double s = -inf;
        for (const cplx& v : vertices) s = std::max(s, geom::dot(v, u));
        return s;
    }

    // min over the region of Re[z e^{i eta}] (-inf when unbounded below).
    double min_support_rot(double eta, double dir_tol = 1e-9) const {
        const cplx u = -std::conj(std::polar(1.0, eta));
        const double h = support(u, dir_tol);
        return (h == inf) ? -inf : -h;
    }

    // Rotation admissible: the region fits in a closed right half-plane after
    // rotation by eta, i.e. every recession generator satisfies
    // Re[d e^{i eta}] >= 0.
    bool eta_admissible(double eta, double dir_tol = 1e-9) const {
        if (kind != Kind::HullCone) return false;
        if (vertices.empty()) return false;
        const cplx ei = std::polar(1.0, eta);
        for (const cplx& d : recession_dirs)
            if ((d * ei).real() < -dir_tol) return false;
        return true;
    }

    bool contains(const cplx& z, double tol = 1e-9, int angle_grid = 2048) const {
        if (kind == Kind::Empty) return false;
        if (kind == Kind::WholePlane) return true;
        if (vertices.empty()) return false;
        for (int k = 0; k < angle_grid; ++k) {
            const double a = 2.0 * pi * k / angle_grid;
            const cplx u{std::cos(a), std::sin(a)};
            const double h = support(u);
            if (h == inf) continue;
            if (geom::dot(z, u) > h + tol) return false;
        }
        return true;
    }

    // Signed distance-like slack: max over directions of <z,u> - h(u).
    // Positive => outside by that margin, negative => inside with margin.
    double outer_slack(const cplx& z, int angle_grid = 2048) const {
        if (kind == Kind::Empty) return inf;
        if (kind == Kind::WholePlane) return -inf;
        double worst = -inf;
        for (int k = 0; k < angle_grid; ++k) {
            const double a = 2.0 * pi * k / angle_grid;
            const cplx u{std::cos(a), std::sin(a)};
            const double h = support(u);
            if (h == inf) continue;
            worst = std::max(worst, geom::dot(z, u) - h);
        }
        return worst;
    }
};

// ---------------------------------------------------------------------------
// Numerical-range set Q: hull of {q(x)/w(x)} plus the cone spanned by the
// directions of p(x) and the dominant escape direction of q/w.

struct RegionOptions {
    int grid_points = 512;
    int max_doublings = 14;
    double stabilization_rel = 1e-6;
};

inline std::vector<double> region_x_grid(const CoefficientProblem& pr, double span_factor,
                                         int n) {
    const double a = pr.interval.a;
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(n) + 1);
    if (pr.interval.infinite()) {
        const double lo = a + 1e-9 * (1.0 + std::abs(a));
        const double hi = std::max(std::abs(a), 1.0) * span_factor + a;
        xs.push_back(a);
        for (int k = 0; k < n; ++k) {
            const double t = static_cast<double>(k) / (n - 1);
            xs.push_back(lo * std::pow(hi / lo, t));
        }
    } else {
        const double b = pr.interval.b;
        xs.push_back(a);
        for (int k = 1; k < n; ++k) {
            const double t = static_cast<double>(k) / n;
            // uniform plus geometric refinement toward the singular end
            xs.push_back(a + (b - a) * (k <= n / 2 ? t : 1.0 - 0.5 * std::pow(0.25, t)));
        }
    }
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    while (!xs.empty() && !(xs.back() < pr.interval.b)) xs.pop_back();
    return xs;
}

inline ConvexRegion build_region(const CoefficientProblem& pr, std::span<const double> x_grid) {
    if (x_grid.empty()) throw input_error("build_region: empty grid");
    ConvexRegion r;
    std::vector<cplx> pts;
    pts.reserve(x_grid.size());
    std::vector<cplx> dirs;
    for (double x : x_grid) {
        if (!(x >= pr.interval.a) || !(x < pr.interval.b))
            throw input_error("build_region: grid point outside [a, b)");
        const Coeffs c = pr.evaluate_unchecked(x);
        pts.push_back(c.q / c.w);
        dirs.push_back(c.p / std::abs(c.p));
    }
    for (const cplx& d : pr.curve_escape_directions()) dirs.push_back(d);

    r.vertices = geom::convex_hull(std::move(pts));
    // deduplicate directions by angle bucket
    std::sort(dirs.begin(), dirs.end(),
              [](const cplx& l, const cplx& rr) { return std::arg(l) < std::arg(rr); });
    for (const cplx& d : dirs) {
        if (r.recession_dirs.empty() ||
            std::abs(d - r.recession_dirs.back()) > 1e-12)
            r.recession_dirs.push_back(d);
    }
    return r;
}

// Default region: log grid with span doubling until the finite part of the
// support function stabilizes.
inline ConvexRegion build_region(const CoefficientProblem& pr, const RegionOptions& opt = {}) {
    double span = 4.0;
    ConvexRegion prev;
    for (int k = 0; k <= opt.max_doublings; ++k, span *= 2.0) {
        const auto grid = region_x_grid(pr, span, opt.grid_points);
        ConvexRegion cur = build_region(pr, grid);
        if (k > 0) {
            double drift = 0.0, scale = 1.0;
            bool comparable = true;
            for (int j = 0; j < 64; ++j) {
                const double a = 2.0 * pi * j / 64;
                const cplx u{std::cos(a), std::sin(a)};
                const double h0 = prev.support(u), h1 = cur.support(u);
                if ((h0 == inf) != (h1 == inf)) {
                    comparable = false;
                    break;
                }
                if (h0 == inf) continue;
                drift = std::max(drift, std::abs(h1 - h0));
                scale = std::max({scale, std::abs(h0), std::abs(h1)});
            }
            if (comparable && drift <= opt.stabilization_rel * scale) return cur;
        }
        prev = std::move(cur);
    }
    return prev;
}

// ---------------------------------------------------------------------------

struct RotationPair {
    double eta = 0.0;
    cplx K;
    cplx source_lambda0;
    double delta = 0.0;  // distance from lambda0 to the half-plane boundary
};

// Re[e^{i eta} cos(alpha) conj(sin(alpha))] <= 0: the boundary-parameter
// constraint selecting S(alpha).
inline bool satisfies_alpha(double eta, const cplx& alpha, double tol = 1e-12) {
    const cplx v = std::polar(1.0, eta) * std::cos(alpha) * std::conj(std::sin(alpha));
    return v.real() <= tol;
}

namespace detail_geom {

// delta(eta) = min_Q Re[z e^{i eta}] - Re[lambda0 e^{i eta}]; the admissible
// translation K for this eta realizes the support minimum.
inline double delta_of_eta(const ConvexRegion& r, const cplx& lambda0, double eta) {
    if (!r.eta_admissible(eta)) return -inf;
    const double s = r.min_support_rot(eta);
    if (s == -inf) return -inf;
    return s - (lambda0 * std::polar(1.0, eta)).real();
}

}  // namespace detail_geom

// Nearest-point construction: K is the closest point of the region to
// lambda0 and eta rotates the supporting line onto the imaginary axis; at a
// hull corner, the line maximizing delta is chosen.  When `alpha` is given,
// the rotation is additionally constrained to the boundary-compatible set.
inline RotationPair admissible_pair_impl(const ConvexRegion& r, const cplx& lambda0,
                                         const cplx* alpha, int eta_grid, double tol) {
    if (r.kind != ConvexRegion::Kind::HullCone || r.vertices.empty())
        throw input_error("admissible_pair: degenerate region");

    double best_eta = 0.0, best_delta = -inf;
    auto consider = [&](double eta) {
        if (eta <= -pi) eta += 2.0 * pi;
        if (eta > pi) eta -= 2.0 * pi;
        if (alpha && !satisfies_alpha(eta, *alpha)) return;
        const double d = detail_geom::delta_of_eta(r, lambda0, eta);
        if (d > best_delta) {
            best_delta = d;
            best_eta = eta;
        }
    };
    for (int k = 0; k < eta_grid; ++k) consider(-pi + 2.0 * pi * (k + 0.5) / eta_grid);
    // window edges: angles where a recession generator turns tangent are
    // frequent optima (rays, sector edges)
    for (const cplx& d : r.recession_dirs) {
        consider(pi / 2.0 - std::arg(d));
        consider(-pi / 2.0 - std::arg(d));
    }
    if (best_delta == -inf)
        throw input_error("admissible_pair: no admissible rotation (region unbounded everywhere)");

    // golden-section refinement around the best angle, keeping the best
    // feasible sample seen (the maximum may sit on the admissibility edge)
    const double h = 2.0 * pi / eta_grid;
    double lo = best_eta - h, hi = best_eta + h;
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    auto eval = [&](double eta) {
        if (alpha && !satisfies_alpha(eta, *alpha)) return -inf;
        const double d = detail_geom::delta_of_eta(r, lambda0, eta);
        if (d > best_delta) {
            best_delta = d;
            best_eta = eta;
        }
        return d;
    };
    double f1 = eval(x1), f2 = eval(x2);
    for (int it = 0; it < 120; ++it) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = eval(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = eval(x1);
        }
    }
    const double eta = best_eta;
    const double delta = best_delta;
    if (!(delta > tol))
        throw input_error("admissible_pair: lambda0 inside or on the boundary of the region");

    RotationPair p;
    p.eta = eta;
    p.delta = delta;
    p.source_lambda0 = lambda0;
    p.K = lambda0 + delta * std::conj(std::polar(1.0, eta));

    // validate the half-plane condition on every stored vertex
    const cplx ei = std::polar(1.0, eta);
    for (const cplx& v : r.vertices)
        if (((v - p.K) * ei).real() < -1e-7 * (1.0 + std::abs(v)))
            throw numeric_error("admissible_pair: vertex violates the half-plane condition");
    if (((lambda0 - p.K) * ei).real() >= 0.0)
        throw numeric_error("admissible_pair: lambda0 not in the open half-plane");
    return p;
}

inline RotationPair admissible_pair(const ConvexRegion& r, const cplx& lambda0,
                                    int eta_grid = 2048, double tol = 1e-9) {
    return admissible_pair_impl(r, lambda0, nullptr, eta_grid, tol);
}

// Pair restricted to rotations compatible with the boundary parameter.
inline RotationPair admissible_pair_for_alpha(const ConvexRegion& r, const cplx& alpha,
                                              const cplx& lambda0, int eta_grid = 2048,
                                              double tol = 1e-9) {
    return admissible_pair_impl(r, lambda0, &alpha, eta_grid, tol);
}

inline RotationPair admissible_pair(const CoefficientProblem& pr, const cplx& lambda0,
                                    int eta_grid = 2048, double tol = 1e-9) {
    return admissible_pair(build_region(pr), lambda0, eta_grid, tol);
}

// ---------------------------------------------------------------------------
// The constraint family behind Q(alpha): for each admissible eta satisfying
// the alpha condition, membership requires Re[lambda e^{i eta}] >= s(eta).

struct AlphaConstraint {
    double eta;
    double threshold;  // min_Q Re[z e^{i eta}]
};

struct AlphaScanOptions {
    int eta_grid = 720;
    double tol = 1e-9;
};

inline std::vector<AlphaConstraint> alpha_constraints(const ConvexRegion& r, const cplx& alpha,
                                                      const AlphaScanOptions& opt = {}) {
    std::vector<AlphaConstraint> out;
    for (int k = 0; k < opt.eta_grid; ++k) {
        const double eta = -pi + 2.0 * pi * (k + 1.0) / opt.eta_grid;
        if (!r.eta_admissible(eta)) continue;
        if (!satisfies_alpha(eta, alpha, opt.tol)) continue;
        const double s = r.min_support_rot(eta);
        if (s == -inf) continue;
        out.push_back({eta, s});
    }
    return out;
}

inline bool q_alpha_member(const ConvexRegion& r, const cplx& alpha, const cplx& lambda,
                           const AlphaScanOptions& opt = {}) {
    for (const AlphaConstraint& c : alpha_constraints(r, alpha, opt)) {
        if ((lambda * std::polar(1.0, c.eta)).real() < c.threshold - opt.tol) return false;
    }
    return true;
}

inline bool q_alpha_member(const CoefficientProblem& pr, const cplx& alpha, const cplx& lambda,
                           const AlphaScanOptions& opt = {}) {
    return q_alpha_member(build_region(pr), alpha, lambda, opt);
}

// ---------------------------------------------------------------------------
// Half-plane intersection (constraints <z, n> >= s) -> ConvexRegion.

namespace detail_geom {

struct HalfPlane {
    cplx n;     // unit inward normal
    double s;   // offset: inside is <z, n> >= s
    cplx p;     // point on boundary
    cplx d;     // direction along boundary with inside on the left
    double ang; // atan2 of d
};

inline bool inside(const HalfPlane& h, const cplx& z, double eps = 1e-9) {
    return geom::dot(z, h.n) >= h.s - eps;
}

inline std::optional<cplx> line_intersect(const HalfPlane& A, const HalfPlane& B) {
    const double den = A.d.real() * B.d.imag() - A.d.imag() * B.d.real();
    if (std::abs(den) < 1e-14) return std::nullopt;
    const cplx w = B.p - A.p;
    const double t = (w.real() * B.d.imag() - w.imag() * B.d.real()) / den;
    return A.p + t * A.d;
}

}  // namespace detail_geom

// Build a ConvexRegion from half-plane constraints.  Degenerate results
// (empty set, a line, a single point) are detected explicitly.
inline ConvexRegion intersect_half_planes(std::vector<AlphaConstraint> cons, double tol = 1e-9) {
    using detail_geom::HalfPlane;
    ConvexRegion out;
    if (cons.empty()) {
        out.kind = ConvexRegion::Kind::WholePlane;
        return out;
    }

    // keep the tightest constraint per angle bucket
    std::sort(cons.begin(), cons.end(), [](const AlphaConstraint& l, const AlphaConstraint& r) {
        return l.eta < r.eta || (l.eta == r.eta && l.threshold > r.threshold);
    });
    std::vector<AlphaConstraint> uniq;
    for (const auto& c : cons) {
        if (!uniq.empty() && std::abs(uniq.back().eta - c.eta) < 1e-12) {
            uniq.back().threshold = std::max(uniq.back().threshold, c.threshold);
        } else {
            uniq.push_back(c);
        }
    }

    std::vector<HalfPlane> hps;
    double scale = 1.0;
    for (const auto& c : uniq) {
        HalfPlane h;
        h.n = std::conj(std::polar(1.0, c.eta));  // <z, n> = Re[z e^{i eta}]
        h.s = c.threshold;
        h.p = c.threshold * h.n;
        h.d = cplx(0.0, -1.0) * h.n;  // inside on the left
        h.ang = std::atan2(h.d.imag(), h.d.real());
        hps.push_back(h);
        scale = std::max(scale, std::abs(c.threshold));
    }

    // line / empty detection from near-antipodal pairs
    for (std::size_t i = 0; i < hps.size(); ++i) {
        for (std::size_t j = i + 1; j < hps.size(); ++j) {
            if (std::abs(hps[i].n + hps[j].n) > 1e-9) continue;
            const double gap = -(hps[i].s + hps[j].s);  // width of the strip
            if (gap < -tol * scale) {
                out.kind = ConvexRegion::Kind::Empty;
                return out;
            }
            if (gap <= tol * scale) {
                // pinned to the line <z, n_i> = s_i; reduce to one dimension
                const cplx p0 = hps[i].s * hps[i].n;
                const cplx dir = hps[i].d;
                double lo = -inf, hi = inf;
                for (const auto& h : hps) {
                    const double along = geom::dot(dir, h.n);
                    const double off = h.s - geom::dot(p0, h.n);
                    if (std::abs(along) < 1e-12) {
                        if (off > tol * scale) {
                            out.kind = ConvexRegion::Kind::Empty;
                            return out;
                        }
                        continue;
                    }
                    const double t = off / along;
                    if (along > 0) lo = std::max(lo, t);
                    else hi = std::min(hi, t);
                }
                if (lo > hi + tol * scale) {
                    out.kind = ConvexRegion::Kind::Empty;
                    return out;
                }
                if (lo == -inf && hi == inf) {
                    out.vertices = {p0};
                    out.recession_dirs = {dir, -dir};
                } else if (lo == -inf) {
                    out.vertices = {p0 + hi * dir};
                    out.recession_dirs = {-dir};
                } else if (hi == inf) {
                    out.vertices = {p0 + lo * dir};
                    out.recession_dirs = {dir};
                } else {
                    out.vertices = {p0 + lo * dir, p0 + hi * dir};
                }
                return out;
            }
        }
    }

    // full-dimensional case: clip a large box through the sorted half-planes
    const double big = 1e7 * scale + 1e7;
    std::vector<cplx> poly = {{-big, -big}, {big, -big}, {big, big}, {-big, big}};
    for (const auto& h : hps) {
        std::vector<cplx> next;
        const std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; ++i) {
            const cplx cur = poly[i], nxt = poly[(i + 1) % n];
            const bool cin = detail_geom::inside(h, cur, tol * scale);
            const bool nin = detail_geom::inside(h, nxt, tol * scale);
            if (cin) next.push_back(cur);
            if (cin != nin) {
                const double dc = geom::dot(cur, h.n) - h.s;
                const double dn = geom::dot(nxt, h.n) - h.s;
                const double t = dc / (dc - dn);
                next.push_back(cur + t * (nxt - cur));
            }
        }
        poly.swap(next);
        if (poly.empty()) break;
    }
    if (poly.empty()) {
        out.kind = ConvexRegion::Kind::Empty;
        return out;
    }

    // vertices clinging to the clip box mark unbounded directions
    const double edge = 0.99 * big;
    bool any_interior = false, any_boundary = false;
    for (const cplx& v : poly) {
        if (std::max(std::abs(v.real()), std::abs(v.imag())) > edge) any_boundary = true;
        else any_interior = true;
    }
    if (!any_interior) {
        // no finite structure at this scale: treat as the whole plane
        out.kind = ConvexRegion::Kind::WholePlane;
        return out;
    }
    for (const cplx& v : poly)
        if (std::max(std::abs(v.real()), std::abs(v.imag())) <= edge) out.vertices.push_back(v);
    out.vertices = geom::convex_hull(std::move(out.vertices));

    if (any_boundary) {
        // recession cone = {v : <v, n_k> >= 0 for all k}; sample the feasible
        // angular arc and emit its endpoints plus interior generators
        const int M = 4096;
        std::vector<bool> ok(M);
        bool full = true;
        int anchor = -1;
        for (int k = 0; k < M; ++k) {
            const double a = 2.0 * pi * k / M;
            const cplx dv{std::cos(a), std::sin(a)};
            bool good = true;
            for (const auto& h : hps)
                if (geom::dot(dv, h.n) < -1e-12) {
                    good = false;
                    break;
                }
            ok[k] = good;
            if (!good) {
                full = false;
                if (anchor < 0) anchor = k;
            }
        }
        if (full) {
            out.kind = ConvexRegion::Kind::WholePlane;
            return out;
        }
        auto emit_run = [&](int start_off, int end_off) {
            const int len = end_off - start_off;
            const int steps = std::max(1, (len * 8) / M + 1);  // spacing <= pi/4
            for (int j = 0; j <= steps; ++j) {
                const int idx = (anchor + start_off + (len * j) / steps) % M;
                const double a = 2.0 * pi * idx / M;
                out.recession_dirs.push_back({std::cos(a), std::sin(a)});
            }
        };
        int run_start = -1;
        for (int off = 0; off < M; ++off) {
            const int k = (anchor + off) % M;
            if (ok[k] && run_start < 0) run_start = off;
            if (!ok[k] && run_start >= 0) {
                emit_run(run_start, off - 1);
                run_start = -1;
            }
        }
        if (run_start >= 0) emit_run(run_start, M - 1);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Q_b(alpha): intersection of the Q_c(alpha) along a schedule of left
// endpoints c -> b.  Thresholds only tighten; a region that keeps receding
// without stabilizing is reported empty.

struct QbResult {
    ConvexRegion region;
    bool receding = false;   // intersection drifts to infinity (empty limit)
    double last_drift = 0.0;
};

inline QbResult q_b_region(const CoefficientProblem& pr, const cplx& alpha,
                           const TruncationSchedule& c_schedule,
                           const AlphaScanOptions& opt = {}) {
    QbResult res;
    const int n_eta = opt.eta_grid;
    std::vector<double> thresholds(static_cast<std::size_t>(n_eta), -inf);
    std::vector<bool> active(static_cast<std::size_t>(n_eta), false);
    std::vector<double> drifts;

    for (double c : c_schedule.points) {
        const CoefficientProblem sub = pr.restricted(c);
        const ConvexRegion rc = build_region(sub);
        double drift = 0.0;
        for (int k = 0; k < n_eta; ++k) {
            const double eta = -pi + 2.0 * pi * (k + 1.0) / n_eta;
            if (!rc.eta_admissible(eta)) continue;
            if (!satisfies_alpha(eta, alpha, opt.tol)) continue;
            const double s = rc.min_support_rot(eta);
            if (s == -inf) continue;
            if (!active[k]) {
                active[k] = true;
                thresholds[k] = s;
            } else if (s > thresholds[k]) {
                drift = std::max(drift, s - thresholds[k]);
                thresholds[k] = s;
            }
        }
        drifts.push_back(drift);
    }

    res.last_drift = drifts.empty() ? 0.0 : drifts.back();
    // receding: the tightening keeps growing through the end of the schedule
    if (drifts.size() >= 3) {
        const double d1 = drifts[drifts.size() - 3], d2 = drifts[drifts.size() - 2],
                     d3 = drifts.back();
        if (d3 > 1e-6 && d3 >= d2 && d2 >= d1 && d1 > 1e-6) res.receding = true;
    }
    if (res.receding) {
        res.region.kind = ConvexRegion::Kind::Empty;
        return res;
    }

    std::vector<AlphaConstraint> cons;
    for (int k = 0; k < n_eta; ++k)
        if (active[k]) cons.push_back({-pi + 2.0 * pi * (k + 1.0) / n_eta, thresholds[k]});
    res.region = intersect_half_planes(cons, opt.tol);
    return res;
}

}  // namespace sims
