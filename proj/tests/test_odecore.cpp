#include <catch2/catch_amalgamated.hpp>

#include "sims/odecore.hpp"
#include "sims/weyl.hpp"

using namespace sims;
using Catch::Approx;

namespace {

// closed forms for the free problem -y'' = lambda y on [1, inf), alpha = 0:
// theta(x) = cos(s(x-1)), phi(x) = -sin(s(x-1))/s with s = sqrt(lambda).
cplx free_theta(const cplx& lambda, double x) {
    const cplx s = sqrt_branch(lambda);
    return std::cos(s * (x - 1.0));
}
cplx free_phi(const cplx& lambda, double x) {
    const cplx s = sqrt_branch(lambda);
    return -std::sin(s * (x - 1.0)) / s;
}

}  // namespace

TEST_CASE("free problem, lambda = 0: straight-line solutions") {
    const auto pr = CoefficientProblem::make_free(0.0);
    const double out[] = {3.0};
    const auto frames = integrate_pair(pr, 0.0, pi / 2.0, 0.0, out);
    REQUIRE(frames.size() == 1);
    const auto& f = frames.back();
    const double sc = std::exp(f.log_scale);
    CHECK((f.theta * sc).real() == Approx(1.0).epsilon(1e-9));
    CHECK(std::abs(f.theta * sc - cplx(1.0, 0.0)) < 1e-9);
    CHECK(std::abs(f.phi * sc - cplx(-2.0, 0.0)) < 1e-9);
}

TEST_CASE("free problem, lambda = 1: trigonometric solutions") {
    const auto pr = CoefficientProblem::make_free(0.0);
    const double out[] = {1.0 + pi / 2.0};
    const auto frames = integrate_pair(pr, 1.0, pi / 2.0, 2.0, out);
    const auto& f = frames.back();
    const double sc = std::exp(f.log_scale);
    CHECK(std::abs(f.theta * sc - cplx(0.0, 0.0)) < 1e-9);
    CHECK(std::abs(f.phi * sc - cplx(-1.0, 0.0)) < 1e-9);
}

TEST_CASE("lagrange bracket basics") {
    // data at a: [theta, phi](a) = -(cos^2 + sin^2) = -1 for any complex alpha
    const cplx alpha(0.4, -0.3);
    const cplx ca = std::cos(alpha), sa = std::sin(alpha);
    const cplx br = lagrange_bracket(ca, sa, sa, -ca);
    CHECK(std::abs(br - cplx(-1.0, 0.0)) < 1e-14);

    // [u, u] = 0
    CHECK(std::abs(lagrange_bracket(ca, sa, ca, sa)) < 1e-15);

    // psi = theta + m phi: [psi, theta](a) = m
    const cplx m(0.7, -1.3);
    const cplx psi_a = ca + m * sa;
    const cplx ppsi_a = sa - m * ca;
    CHECK(std::abs(lagrange_bracket(psi_a, ppsi_a, ca, sa) - m) < 1e-14);
}

TEST_CASE("Wronskian identity along the trajectory") {
    const auto pr =
        CoefficientProblem::make_oscillator(std::polar(1.0, pi / 3.0), 2.0, pi / 2.0);
    std::vector<double> outs{1.0, 2.0, 4.0, 6.0, 8.0, 10.0};
    const auto frames = integrate_pair(pr, cplx(0.0, 1.0), -pi / 2.0, 0.0, outs);
    for (const auto& f : frames) {
        CAPTURE(f.x);
        // asserted within the measurable window of the cancellation-limited bracket
        const double floor = f.wronskian_noise_floor();
        CHECK(std::abs(f.wronskian() - cplx(-1.0, 0.0)) < 1e-9 + 10.0 * floor);
    }
    // renormalization window
    for (const auto& f : frames) {
        const double n2 = std::norm(f.theta) + std::norm(f.p_dtheta) + std::norm(f.phi) +
                          std::norm(f.p_dphi);
        CHECK(n2 <= 4.0 + 1e-9);
        CHECK(n2 >= 0.25 - 1e-9);
    }
}

TEST_CASE("high-precision re-integration agrees (internal consistency)") {
    const auto pr =
        CoefficientProblem::make_oscillator(std::polar(1.0, pi / 3.0), 2.0, pi / 2.0);
    const double out[] = {10.0};
    IntegrationSettings hi;
    hi.rtol = 1e-12;
    hi.atol = 1e-14;
    const auto f1 = integrate_pair(pr, cplx(0.0, 1.0), -pi / 2.0, 0.0, out).back();
    const auto f2 = integrate_pair(pr, cplx(0.0, 1.0), -pi / 2.0, 0.0, out, hi).back();
    // compare scale-invariant ratios
    const cplx r1 = f1.p_dtheta / f1.theta, r2 = f2.p_dtheta / f2.theta;
    CHECK(std::abs(r1 - r2) < 1e-7 * (1.0 + std::abs(r1)));
    CHECK(std::abs(f1.wronskian() - cplx(-1.0, 0.0)) < 1e-9 + 10.0 * f1.wronskian_noise_floor());
}

TEST_CASE("energy accumulator matches direct quadrature of the closed form") {
    // free problem, eta = pi/2, lambda = i, y = phi:
    // integrand Re[i(p|phi'|^2 + (q - i w)|phi|^2)] = |phi|^2 with phi real part only...
    // computed directly from the closed form by fine Simpson quadrature.
    const auto pr = CoefficientProblem::make_free(0.0);
    const cplx lambda(0.0, 1.0);
    const double upto = 2.0;
    const double out[] = {upto};
    const auto f = integrate_pair(pr, lambda, pi / 2.0, 0.0, out).back();

    const int n = 20001;
    double acc = 0.0;
    const cplx ei(0.0, 1.0);
    for (int k = 0; k < n; ++k) {
        const double x = 1.0 + (upto - 1.0) * k / (n - 1.0);
        const cplx s = sqrt_branch(lambda);
        const cplx phi = free_phi(lambda, x);
        const cplx dphi = -std::cos(s * (x - 1.0));
        const double integrand =
            (ei * (std::norm(dphi) + (cplx(0.0, 0.0) - lambda) * std::norm(phi))).real();
        const double wgt = (k == 0 || k == n - 1) ? 0.5 : 1.0;
        acc += wgt * integrand;
    }
    acc *= (upto - 1.0) / (n - 1.0);

    CHECK(f.energy_phi.value() == Approx(acc).epsilon(1e-6));

    // monotone when lambda is in the admissible half-plane (integrand >= 0)
    std::vector<double> outs{1.5, 2.0, 3.0, 4.0};
    const auto frames = integrate_pair(pr, lambda, pi / 2.0, 0.0, outs);
    double prev = 0.0;
    for (const auto& fr : frames) {
        const double e = fr.energy_phi.value();
        CHECK(e >= prev - 1e-12);
        prev = e;
    }
}

TEST_CASE("energy of the zero solution is zero") {
    const auto pr = CoefficientProblem::make_free(0.0);
    const auto tr = integrate_solution(pr, cplx(0.0, 1.0), pi / 2.0, 1.0, 5.0, cplx(0.0, 0.0),
                                       cplx(0.0, 0.0), std::vector<double>{5.0});
    CHECK(tr.pts.back().energy.value() == 0.0);
    CHECK(tr.pts.back().l2w.value() == 0.0);
}

TEST_CASE("Green's identity across two spectral parameters") {
    // (lambda' - lambda) int_Y^X theta(.,lambda) phi(.,lambda') w
    //   = -[theta, phi'](X) + [theta, phi'](Y) + (bracket terms of the identity)
    // Checked as: int u M[v] - v M[u] over [a, X] equals bracket difference,
    // with u = theta(lambda), v = phi(lambda'), M[v] = lambda' v, M[u] = lambda u.
    const auto pr =
        CoefficientProblem::make_oscillator(std::polar(1.0, pi / 3.0), 2.0, cplx(0.7, 0.0));
    const cplx l1(0.0, 1.0), l2(1.0, 2.0);
    std::vector<double> outs{2.0, 5.0};
    const auto cross = integrate_joint_pair(pr, l1, l2, outs);

    for (const auto& ci : cross) {
        const auto& f1 = ci.frame1;
        const auto& f2 = ci.frame2;
        // brackets need a common de-rescaling: values are stored with separate
        // joint log scale, but frame1/frame2 share it by construction
        REQUIRE(f1.log_scale == f2.log_scale);
        const double sc2 = std::exp(2.0 * f1.log_scale);
        const cplx bracket_X =
            lagrange_bracket(f1.theta, f1.p_dtheta, f2.phi, f2.p_dphi) * sc2;
        // at a: theta = cos, p theta' = sin; phi' data: phi = sin, p phi' = -cos
        const cplx ca = std::cos(pr.alpha), sa = std::sin(pr.alpha);
        const cplx bracket_a = lagrange_bracket(ca, sa, sa, -ca);
        const cplx lhs = (l2 - l1) * ci.theta_phi;
        const cplx rhs = -bracket_X + bracket_a;
        CAPTURE(ci.x);
        CHECK(std::abs(lhs - rhs) < 1e-8 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("imaginary-part identity on a random power-law problem") {
    // For u = v = phi the combination (conj(p) - p)|phi'|^2 + (conj(q) - q)|phi|^2
    // equals the boundary-term difference of the conjugated Green identity.
    // Here it is exercised as: Im[ int (p|phi'|^2 + (q - lambda w)|phi|^2) ]
    // == Im[ -p phi' conj(phi) |_a^X ] for real lambda... use energy machinery:
    // cross-check P-form accumulators against a direct quadrature.
    PowerLawParams pl;
    pl.p1 = 0.6;
    pl.p2 = 0.8;
    pl.a1 = 0.0;
    pl.a2 = 0.0;
    pl.q1 = -1.0;
    pl.q2 = -0.5;
    pl.b1 = 1.0;
    pl.b2 = 2.0;
    pl.omega = 0.0;
    const auto pr = CoefficientProblem::make_power_law(pl, cplx(0.3, 0.0));
    const cplx lambda(0.5, 1.5);
    const double out[] = {2.5};
    const auto f = integrate_pair(pr, lambda, pi / 2.0, 0.0, out).back();

    // direct fine-grid quadrature of p |phi'|^2 from a re-integration trace
    const int n = 4001;
    std::vector<double> xs(n);
    for (int k = 0; k < n; ++k) xs[k] = 1.0 + 1.5 * k / (n - 1.0);
    const cplx ca = std::cos(pr.alpha), sa = std::sin(pr.alpha);
    const auto tr = integrate_solution(pr, lambda, pi / 2.0, 1.0, 2.5, sa, -ca, xs);
    cplx acc(0.0, 0.0);
    for (int k = 0; k < n; ++k) {
        const Coeffs c = pr.evaluate_unchecked(xs[k]);
        const cplx pd = tr.pts[k].momentum().value();
        const cplx integrand = pd * std::conj(pd) / std::conj(c.p);
        acc += ((k == 0 || k == n - 1) ? 0.5 : 1.0) * integrand;
    }
    acc *= 1.5 / (n - 1.0);
    const cplx pform = f.p_form_phi.value();
    CHECK(std::abs(pform - acc) < 1e-5 * (1.0 + std::abs(acc)));
}
