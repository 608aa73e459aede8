#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "sims/odecore.hpp"
#include "sims/problem.hpp"
#include "sims/rangegeom.hpp"
#include "sims/series.hpp"
#include "sims/seq.hpp"
#include "sims/weyl.hpp"

namespace sims {

enum class Trichotomy { I, II, III };

inline const char* trichotomy_name(Trichotomy t) {
    switch (t) {
        case Trichotomy::I: return "I";
        case Trichotomy::II: return "II";
        case Trichotomy::III: return "III";
    }
    return "?";
}

struct SimsEvidence {
    double rho_limit = 0.0;          // extrapolated limit radius (0 in the limit-point case)
    TailVerdict theta_l2w =          // L2(w) tail of the second solution theta + sigma phi
        TailVerdict::Inconclusive;
    TailVerdict phi_l2w = TailVerdict::Inconclusive;
    double psi_energy = 0.0;         // rotated energy of the distinguished solution
};

struct SimsCase {
    Trichotomy kind = Trichotomy::I;
    SimsEvidence evidence;
    double eta = 0.0;   // rotation pair used (recorded: the split may depend on it)
    cplx K;
};

// ---------------------------------------------------------------------------
// Numeric route: disk limit plus tail tests of the weighted L2 masses.

inline SimsCase sims_classify_numeric(const CoefficientProblem& pr, double eta, const cplx& K,
                                      const cplx& lambda, const TruncationSchedule& sched,
                                      const LimitThresholds& th = {},
                                      const IntegrationSettings& st = {}) {
    const LimitResult lim = limit_disk(pr, eta, K, lambda, sched, th, st);
    const auto frames = integrate_pair(pr, lambda, eta, K, sched.points, st);

    SimsCase out;
    out.eta = eta;
    out.K = K;

    std::vector<double> phi_inc;
    for (std::size_t i = 0; i + 1 < frames.size(); ++i)
        phi_inc.push_back((frames[i + 1].l2w_phi - frames[i].l2w_phi).value());
    out.evidence.phi_l2w = tail_ratio_verdict(phi_inc);

    if (lim.kind == LimitResult::Kind::LimitCircle) {
        out.kind = Trichotomy::III;
        out.evidence.rho_limit = lim.final_disk.radius;
        // all solutions have finite weighted mass in this case; record the tails
        std::vector<double> th_inc;
        for (std::size_t i = 0; i + 1 < frames.size(); ++i)
            th_inc.push_back((frames[i + 1].l2w_psi(lim.m) - frames[i].l2w_psi(lim.m)).value());
        out.evidence.theta_l2w = tail_ratio_verdict(th_inc);
        out.evidence.psi_energy = frames.back().energy_psi(lim.m).value();
        return out;
    }

    // limit point: recover the distinguished solution backward and test tails
    out.evidence.rho_limit = 0.0;
    const std::size_t bi = pick_backcast_index(frames);
    // geometric output points from the backcast start toward a, enough of
    // them for the tail-ratio test regardless of where the start landed
    std::vector<double> desc;
    {
        const double a = pr.interval.a;
        const double span = frames[bi].x - a;
        const int m = 12;
        const double rho = std::pow(0.01, 1.0 / m);
        for (int k = 0; k <= m; ++k) desc.push_back(a + span * std::pow(rho, k));
        desc.push_back(a);
    }
    const PsiTrace psi = backcast_psi(pr, lambda, eta, frames[bi], lim.m, desc, st);

    std::vector<double> psi_inc;
    const auto& pts = psi.trace.pts;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        psi_inc.push_back(std::abs((pts[i].l2w - pts[i + 1].l2w).value()));
    // backward trace: increments run from deep truncation toward a; reverse to
    // get the tail order
    std::reverse(psi_inc.begin(), psi_inc.end());
    out.evidence.theta_l2w = tail_ratio_verdict(psi_inc);

    const ScaledReal gain =
        ScaledComplex(psi.trace.scale_factor, psi.trace.scale_log).abs2_scaled();
    out.evidence.psi_energy = (ScaledReal(std::abs(pts.back().energy.m), pts.back().energy.e) *
                               gain)
                                  .value();

    if (out.evidence.theta_l2w != TailVerdict::Convergent)
        throw numeric_error(
            "sims_classify_numeric: distinguished solution mass tail inconclusive");
    if (out.evidence.phi_l2w == TailVerdict::Inconclusive)
        throw numeric_error("sims_classify_numeric: phi mass tail inconclusive");

    out.kind = (out.evidence.phi_l2w == TailVerdict::Convergent) ? Trichotomy::II : Trichotomy::I;
    return out;
}

// ---------------------------------------------------------------------------
// Asymptotic route for power-law coefficients.

enum class GrowthRegime { Sub, Euler, Super };

struct AsymptoticData {
    double A = 0.0, B = 0.0;
    GrowthRegime regime = GrowthRegime::Sub;
    double tau = 0.0, D = 0.0, gamma = 0.0, epsilon = 0.0;
    double euler_c = 0.0;
    double w_plus_expo = 0.0, w_minus_expo = 0.0;  // orders of the energy densities
    bool w_orders_assume_no_cancellation = false;
};

inline PowerLawParams oscillator_as_power_law(const cplx& c, double beta) {
    PowerLawParams pl;
    pl.p1 = 1.0;
    pl.p2 = 0.0;
    pl.a1 = pl.a2 = 0.0;
    pl.q1 = c.real();
    pl.q2 = c.imag();
    pl.b1 = pl.b2 = beta;
    pl.omega = 0.0;
    return pl;
}

inline AsymptoticData liouville_green_exponents(const PowerLawParams& pl, const cplx& lambda) {
    AsymptoticData out;
    constexpr double exp_tol = 1e-9;

    double A = -inf;
    if (pl.p1 != 0.0) A = std::max(A, pl.a1);
    if (pl.p2 != 0.0) A = std::max(A, pl.a2);
    if (A == -inf) throw input_error("liouville_green_exponents: p vanishes identically");
    double B = pl.omega;
    if (pl.q1 != 0.0) B = std::max(B, pl.b1);
    if (pl.q2 != 0.0) B = std::max(B, pl.b2);
    out.A = A;
    out.B = B;

    const PowerSum p = PowerSum::monomial({pl.p1, 0.0}, pl.a1) +
                       PowerSum::monomial({0.0, pl.p2}, pl.a2);
    const PowerSum s = PowerSum::monomial({pl.q1, 0.0}, pl.b1) +
                       PowerSum::monomial({0.0, pl.q2}, pl.b2) +
                       PowerSum::monomial(-lambda, pl.omega);
    if (s.zero()) throw input_error("liouville_green_exponents: q - lambda w vanishes");

    out.gamma = (p * s).leading_expo();

    const double diff = A - B;
    if (diff > 2.0 + exp_tol) {
        out.regime = GrowthRegime::Super;
        return out;
    }
    if (diff > 2.0 - exp_tol) {
        out.regime = GrowthRegime::Euler;
        out.euler_c = 0.25 * (std::sqrt(17.0) - 1.0);
        return out;
    }
    out.regime = GrowthRegime::Sub;

    // Re[(s/p)^{1/2}] = D x^tau (1 + O(x^-epsilon)) with the branch
    // r^{1/2} e^{i theta/2}, theta in [0, 2 pi)
    const PowerSum root = (s * p.reciprocal()).root();
    double expo = 0.0, coef = 0.0;
    if (!root.leading_real_term(expo, coef)) {
        out.D = 0.0;
        out.tau = -inf;  // real part vanishes through all computed orders
        return out;
    }
    out.D = coef;
    out.tau = expo;
    out.epsilon = inf;
    bool past = false;
    for (const auto& t : root.terms()) {
        if (!past) {
            if (std::abs(t.expo - expo) < exp_tol) past = true;
            continue;
        }
        if (std::abs(t.coef.real()) > 1e-11) {
            out.epsilon = expo - t.expo;
            break;
        }
    }
    return out;
}

struct AsymptoticOutcome {
    std::optional<Trichotomy> kind;    // empty when inconclusive
    std::string detail;                // which rule fired / why inconclusive
    AsymptoticData data;
    double eta_used = 0.0;
};

// Rotation for the energy densities: admissible eta containing lambda in its
// half-plane and compatible with alpha, maximizing the distance.
inline std::optional<double> pick_alpha_eta(const ConvexRegion& region, const cplx& alpha,
                                            const cplx& lambda) {
    try {
        return admissible_pair_for_alpha(region, alpha, lambda).eta;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

inline AsymptoticOutcome asymptotic_classify(const PowerLawParams& pl, const cplx& alpha,
                                             const cplx& lambda) {
    constexpr double margin = 1e-6;
    AsymptoticOutcome out;
    out.data = liouville_green_exponents(pl, lambda);
    const AsymptoticData& d = out.data;

    const auto pr = CoefficientProblem::make_power_law(pl, alpha);
    const auto region = build_region(pr);
    const auto eta_opt = pick_alpha_eta(region, alpha, lambda);
    if (!eta_opt) {
        out.detail = "lambda not inside any admissible alpha-compatible half-plane";
        return out;
    }
    const double eta = *eta_opt;
    out.eta_used = eta;

    const PowerSum p = PowerSum::monomial({pl.p1, 0.0}, pl.a1) +
                       PowerSum::monomial({0.0, pl.p2}, pl.a2);
    const PowerSum s = PowerSum::monomial({pl.q1, 0.0}, pl.b1) +
                       PowerSum::monomial({0.0, pl.q2}, pl.b2) +
                       PowerSum::monomial(-lambda, pl.omega);

    auto decide_w = [&](double w_plus, double w_minus) {
        out.data.w_plus_expo = w_plus;
        out.data.w_minus_expo = w_minus;
        const double worst = std::max(w_plus, w_minus);
        if (worst < -1.0 - margin) {
            out.kind = Trichotomy::III;
            out.detail += "; both energy densities integrable";
        } else if (worst > -1.0 + margin) {
            out.kind = Trichotomy::II;
            out.detail += "; a non-integrable energy density";
        } else {
            out.detail += "; energy-density order at the integrability boundary";
        }
    };

    if (d.regime == GrowthRegime::Sub) {
        if (d.D == 0.0 && d.tau == -inf) {
            out.detail = "degenerate: Re[(s/p)^{1/2}] vanishes through computed orders";
            return out;
        }
        if (d.tau > -1.0 + margin) {
            out.kind = Trichotomy::I;
            out.detail = "sub-regime: tau > -1";
            return out;
        }
        const bool tau_is_minus_one = std::abs(d.tau + 1.0) <= 1e-9;
        if (!tau_is_minus_one && d.tau > -1.0 - margin) {
            out.detail = "sub-regime: tau at the boundary -1";
            return out;
        }
        if (tau_is_minus_one) {
            const double lhs = 2.0 * std::abs(d.D) + pl.omega - d.gamma / 2.0 + 1.0;
            if (lhs > margin) {
                out.kind = Trichotomy::I;
                out.detail = "sub-regime: tau = -1 and 2|D| + omega - gamma/2 + 1 >= 0";
                return out;
            }
            if (lhs >= -margin) {
                out.detail = "sub-regime: item-2 boundary equality";
                return out;
            }
        } else {
            const double lhs = pl.omega - d.gamma / 2.0 + 1.0;
            if (lhs > margin) {
                out.kind = Trichotomy::I;
                out.detail = "sub-regime: tau < -1 and omega - gamma/2 + 1 >= 0";
                return out;
            }
            if (lhs >= -margin) {
                out.detail = "sub-regime: item-3 boundary equality";
                return out;
            }
        }
        // neither sub-case: II vs III through the rotated energy densities
        // W_pm = Re[e^{i eta} kappa] |y_pm|^2 with kappa = |s| p/|p| + s
        const PowerSum kappa = s.magnitude() * p * p.magnitude().reciprocal() + s;
        out.detail = "sub-regime: not in the limit-point list";
        if (kappa.zero()) {
            out.detail += "; kappa vanishes through computed orders";
            return out;
        }
        double kexpo = 0.0, kcoef = 0.0;
        if (!kappa.scaled(std::polar(1.0, eta)).leading_real_term(kexpo, kcoef)) {
            out.detail += "; rotated kappa has no real part through computed orders";
            return out;
        }
        const double shift = tau_is_minus_one ? 2.0 * d.D : 0.0;
        decide_w(kexpo - d.gamma / 2.0 + shift, kexpo - d.gamma / 2.0 - shift);
        return out;
    }

    if (d.regime == GrowthRegime::Euler) {
        const double c = d.euler_c;
        const double A = d.A;
        double lhs;
        if (A > 1.0 + 1e-9) lhs = pl.omega + 4.0 * (A - 1.0) * c + 1.0;
        else if (A >= 1.0 - 1e-9) lhs = pl.omega + 1.0;
        else lhs = pl.omega - 4.0 * (A - 1.0) * (0.5 + c) + 1.0;
        if (lhs > margin) {
            out.kind = Trichotomy::I;
            out.detail = "euler-regime limit-point list";
            return out;
        }
        if (lhs >= -margin) {
            out.detail = "euler-regime boundary equality";
            return out;
        }
        out.detail = "euler-regime: not in the limit-point list (orders assume no cancellation)";
        out.data.w_orders_assume_no_cancellation = true;
        decide_w(A - 2.0 + 4.0 * (A - 1.0) * c, -A - 4.0 * (A - 1.0) * c);
        return out;
    }

    // Super regime
    const double lhs = pl.omega - std::min(0.0, d.A + d.B) + 1.0;
    if (lhs > margin) {
        out.kind = Trichotomy::I;
        out.detail = "super-regime: omega - min(0, A+B) >= -1";
        return out;
    }
    if (lhs >= -margin) {
        out.detail = "super-regime boundary equality";
        return out;
    }
    out.detail = "super-regime: not limit point (orders assume no cancellation)";
    out.data.w_orders_assume_no_cancellation = true;
    decide_w(d.B, -d.A);
    return out;
}

inline AsymptoticOutcome asymptotic_classify(const CoefficientProblem& pr, const cplx& lambda) {
    if (pr.family == Family::PowerLaw) return asymptotic_classify(pr.power, pr.alpha, lambda);
    if (pr.family == Family::OscillatorSector)
        return asymptotic_classify(oscillator_as_power_law(pr.osc_c, pr.osc_beta), pr.alpha,
                                   lambda);
    if (pr.family == Family::Free)
        return asymptotic_classify(PowerLawParams{}, pr.alpha, lambda);
    throw input_error("asymptotic_classify: requires a power-law-shaped family");
}

// ---------------------------------------------------------------------------

struct IndependenceEntry {
    cplx lambda;
    std::optional<Trichotomy> kind;
    std::string note;
};

struct IndependenceReport {
    std::vector<IndependenceEntry> entries;
    bool all_agree = true;
    std::vector<std::string> warnings;
};

// Classification at several spectral parameters inside one half-plane; the
// trichotomy must not depend on lambda, so disagreement is flagged as a
// resolution warning rather than resolved.
inline IndependenceReport lambda_independence_report(const CoefficientProblem& pr, double eta,
                                                     const cplx& K,
                                                     const std::vector<cplx>& lambdas,
                                                     const TruncationSchedule& sched,
                                                     const LimitThresholds& th = {}) {
    IndependenceReport rep;
    std::optional<Trichotomy> first;
    for (const cplx& l : lambdas) {
        IndependenceEntry e;
        e.lambda = l;
        try {
            const SimsCase c = sims_classify_numeric(pr, eta, K, l, sched, th);
            e.kind = c.kind;
            if (!first) first = c.kind;
            else if (*first != c.kind) rep.all_agree = false;
        } catch (const numeric_error& err) {
            e.note = err.what();
            rep.warnings.push_back("lambda = " + format_complex(l) + ": " + err.what());
        }
        rep.entries.push_back(std::move(e));
    }
    if (!rep.all_agree)
        rep.warnings.push_back(
            "classification varies across lambda: numerical resolution warning");
    return rep;
}

// ---------------------------------------------------------------------------
// Split of the energy condition for real nonnegative p: the Sobolev part,
// the rotated potential part and the plain weighted mass are reported
// separately when the split applies.

struct EnergySplitReport {
    bool applicable = false;
    TailVerdict sobolev = TailVerdict::Inconclusive;      // cos(eta) int p |y'|^2
    TailVerdict potential = TailVerdict::Inconclusive;    // int Re[e^{i eta}(q - K w)] |y|^2
    TailVerdict mass = TailVerdict::Inconclusive;         // int |y|^2 w
};

inline EnergySplitReport energy_split_report(const CoefficientProblem& pr, double eta,
                                             const cplx& K, const cplx& lambda,
                                             const TruncationSchedule& sched,
                                             const IntegrationSettings& st = {}) {
    EnergySplitReport rep;
    // applicability: p real and nonnegative, rotated potential density >= 0
    for (int k = 0; k < 200; ++k) {
        const double t = k / 199.0;
        const double x = pr.interval.a +
                         (std::isinf(pr.interval.b) ? std::pow(10.0, 6.0 * t)
                                                    : t * (pr.interval.b - pr.interval.a) * 0.99);
        if (!(x >= pr.interval.a) || !(x < pr.interval.b)) continue;
        const Coeffs c = pr.evaluate_unchecked(x);
        if (std::abs(c.p.imag()) > 1e-12 * std::abs(c.p) || c.p.real() < 0.0) return rep;
        if ((std::polar(1.0, eta) * (c.q - K * c.w)).real() < -1e-9) return rep;
    }
    rep.applicable = true;

    const auto frames = integrate_pair(pr, lambda, eta, K, sched.points, st);
    const double ce = std::cos(eta);
    std::vector<double> sob, pot, mass;
    for (std::size_t i = 0; i + 1 < frames.size(); ++i) {
        const cplx dp = (ScaledComplex(frames[i + 1].p_form_phi.m, frames[i + 1].p_form_phi.e) +
                         ScaledComplex(-frames[i].p_form_phi.m, frames[i].p_form_phi.e))
                            .value();
        const double dE_K = (energy_with_k(frames[i + 1].energy_phi, frames[i + 1].l2w_phi,
                                           lambda, K, eta) -
                             energy_with_k(frames[i].energy_phi, frames[i].l2w_phi, lambda, K,
                                           eta))
                                .value();
        const double dw = (frames[i + 1].l2w_phi - frames[i].l2w_phi).value();
        sob.push_back(ce * dp.real());
        pot.push_back(dE_K - ce * dp.real());
        mass.push_back(dw);
    }
    rep.sobolev = tail_ratio_verdict(sob);
    rep.potential = tail_ratio_verdict(pot);
    rep.mass = tail_ratio_verdict(mass);
    return rep;
}

}  // namespace sims
