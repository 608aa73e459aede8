#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "sims/rangegeom.hpp"
#include "sims/weyl.hpp"

using namespace sims;
using Catch::Approx;

namespace {

SolutionFrame frame_at(const CoefficientProblem& pr, const cplx& lambda, double eta, double X) {
    const double out[] = {X};
    return integrate_pair(pr, lambda, eta, 0.0, out).back();
}

}  // namespace

TEST_CASE("mobius map is the identity at the left endpoint for alpha = 0") {
    const auto pr = CoefficientProblem::make_free(0.0);
    const auto f = frame_at(pr, cplx(0.0, 1.0), pi / 2.0, 1.0);
    for (const cplx z : {cplx(0.3, 0.7), cplx(-2.0, 0.1), cplx(0.0, -5.0)}) {
        CHECK(std::abs(mobius_l(f, z) - z) < 1e-12);
        CHECK(std::abs(mobius_z(f, z) - z) < 1e-12);
    }
}

TEST_CASE("mobius round trip and boundary point") {
    const auto pr =
        CoefficientProblem::make_oscillator(std::polar(1.0, pi / 3.0), 2.0, pi / 2.0);
    const cplx lambda(0.0, 1.0);
    const double eta = pi / 6.0;
    const auto f = frame_at(pr, lambda, eta, 3.0);
    for (const cplx z : {cplx(1.0, 2.0), cplx(-0.5, 0.25), cplx(3.0, -1.0)}) {
        const cplx l = mobius_l(f, z);
        CHECK(std::abs(mobius_z(f, l) - z) < 1e-9 * (1.0 + std::abs(z)));
    }

    // z = 0 maps to -theta'/phi', a point of the bounding circle
    const WeylDisk d = weyl_disk_from_frame(f, pr.alpha, eta, lambda);
    const cplx bd = mobius_l(f, cplx(0.0, 0.0));
    CHECK(std::abs(bd - (-f.p_dtheta / f.p_dphi)) < 1e-12);
    CHECK(std::abs(std::abs(bd - d.center) - d.radius) < 1e-8 * (1.0 + d.radius));
}

TEST_CASE("a_functional closed forms") {
    // alpha = 0: A = Re[e^{i eta} l]
    const cplx l(0.37, -1.21);
    for (double eta : {0.2, -1.0, 2.5}) {
        CHECK(a_functional(0.0, eta, l) ==
              Approx((std::polar(1.0, eta) * l).real()).margin(1e-14));
        CHECK(a_functional(pi / 2.0, eta, l) ==
              Approx(-(std::polar(1.0, eta) * std::conj(l)).real()).margin(1e-14));
    }
    CHECK(a_functional(pi / 4.0, 0.0, cplx(0.0, 0.0)) == Approx(-0.5));
}

TEST_CASE("disk radius limits at the left endpoint") {
    // p = -1, q = -x, w = 1 on [1, inf): rotation eta = pi admissible.
    auto pr = CoefficientProblem::make_tabulated(
        {1.0, inf}, [](double) { return cplx(-1.0, 0.0); },
        [](double x) { return cplx(-x, 0.0); }, [](double) { return 1.0; }, pi / 4.0);

    const cplx lambda(1.0, 0.0);
    const double eta = pi;
    std::vector<double> outs{1.0, 1.0 + 1e-6};
    const auto frames = integrate_pair(pr, lambda, eta, 0.0, outs);

    // boundary term 1/2 gives rho -> 1 as X -> a+
    const WeylDisk d0 = weyl_disk_from_frame(frames[0], pr.alpha, eta, lambda);
    CHECK(d0.radius == Approx(1.0).epsilon(1e-9));
    const WeylDisk d1 = weyl_disk_from_frame(frames[1], pr.alpha, eta, lambda);
    CHECK(d1.radius < d0.radius + 1e-12);
    CHECK(d1.radius == Approx(1.0).epsilon(1e-4));

    // alpha = 0 zeroes the boundary term: infinite disk at X = a
    auto pr0 = pr.with_alpha(0.0);
    const auto f0 = integrate_pair(pr0, lambda, eta, 0.0, std::vector<double>{1.0}).back();
    const WeylDisk dinf = weyl_disk_from_frame(f0, pr0.alpha, eta, lambda);
    CHECK(std::isinf(dinf.radius));
}

TEST_CASE("free problem: both radius formulas match the closed form") {
    const auto pr = CoefficientProblem::make_free(0.0);
    const cplx lambda(0.0, 1.0);
    const double eta = pi / 2.0;
    const double X = 6.0;
    const auto f = frame_at(pr, lambda, eta, X);
    const WeylDisk d = weyl_disk_from_frame(f, pr.alpha, eta, lambda, 1e-8);

    // closed form phi(x) = -sin(s(x-1))/s, p phi' = -cos(s(x-1)), s = sqrt(lambda)
    const cplx s = sqrt_branch(lambda);
    const cplx phi = -std::sin(s * (X - 1.0)) / s;
    const cplx pdphi = -std::cos(s * (X - 1.0));
    const double denom = 2.0 * std::abs((cplx(0.0, 1.0) * pdphi * std::conj(phi)).real());
    const double rho_cf = 1.0 / denom;
    CHECK(d.radius == Approx(rho_cf).epsilon(1e-8));
    CHECK(d.radius_boundary_form == Approx(rho_cf).epsilon(1e-8));
}

TEST_CASE("disk membership: energy and geometry agree") {
    const auto pr =
        CoefficientProblem::make_oscillator(std::polar(1.0, pi / 3.0), 2.0, pi / 2.0);
    const cplx lambda(0.0, 1.0);
    const auto pair = admissible_pair(build_region(pr), lambda);
    const auto f = frame_at(pr, lambda, pair.eta, 2.0);
    const WeylDisk d = weyl_disk_from_frame(f, pr.alpha, pair.eta, lambda);

    CHECK(disk_membership(f, pr.alpha, pair.eta, lambda, d.center));
    CHECK_FALSE(disk_membership(f, pr.alpha, pair.eta, lambda, d.center + 2.0 * d.radius));

    // points on the circle: energy equality within tolerance
    for (int k = 0; k < 8; ++k) {
        const cplx l = d.center + d.radius * std::polar(1.0, 2.0 * pi * k / 8.0);
        const double energy = f.energy_psi(l).value();
        const double bound = a_functional(pr.alpha, pair.eta, l);
        CHECK(std::abs(energy - bound) < 1e-7 * (1.0 + std::abs(bound)));
    }

    // random probes: the two routes agree (and do not throw)
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> un(-3.0, 3.0);
    for (int k = 0; k < 1000; ++k) {
        const cplx l = d.center + cplx(un(rng), un(rng)) * d.radius;
        CHECK_NOTHROW(disk_membership(f, pr.alpha, pair.eta, lambda, l));
    }
}

TEST_CASE("free problem limit point: m = -i sqrt(lambda)") {
    const auto pr = CoefficientProblem::make_free(0.0);
    const cplx lambda(0.0, 1.0);
    const auto sched = make_schedule(pr.interval, 2.0, 1.6, 8);
    const auto res = limit_disk(pr, pi / 2.0, 0.0, lambda, sched);
    REQUIRE(res.kind == LimitResult::Kind::LimitPoint);

    const cplx m_expected = -cplx(0.0, 1.0) * sqrt_branch(lambda);  // decaying exponential
    CHECK(std::abs(res.m - m_expected) < 1e-9);
    CHECK(std::abs(res.m - std::polar(1.0, -pi / 4.0)) < 1e-9);

    // radii strictly decreasing
    for (std::size_t i = 0; i + 1 < res.radii.size(); ++i)
        CHECK(res.radii[i + 1] < res.radii[i]);
}

TEST_CASE("oscillator sector limit point vs limit circle") {
    // arg c = pi/3, beta = 2: limit point at lambda = i
    {
        const auto pr =
            CoefficientProblem::make_oscillator(std::polar(1.0, pi / 3.0), 2.0, pi / 2.0);
        const cplx lambda(0.0, 1.0);
        const auto pair = admissible_pair(build_region(pr), lambda);
        const auto sched = make_schedule(pr.interval, 1.5, 1.5, 6);
        const auto res = limit_disk(pr, pair.eta, pair.K, lambda, sched);
        CHECK(res.kind == LimitResult::Kind::LimitPoint);
    }
    // arg c = pi, beta = 3: limit circle at lambda = i
    {
        const auto pr = CoefficientProblem::make_oscillator(cplx(-1.0, 0.0), 3.0, pi / 2.0);
        const cplx lambda(0.0, 1.0);
        const auto sched = make_schedule(pr.interval, 2.0, 2.0, 6);
        const auto res = limit_disk(pr, pi / 2.0, 0.0, lambda, sched);
        CHECK(res.kind == LimitResult::Kind::LimitCircle);
        CHECK(res.final_disk.radius > 1e-3);
        // radius trace still strictly decreasing toward the limit disk
        for (std::size_t i = 0; i + 1 < res.radii.size(); ++i)
            CHECK(res.radii[i + 1] < res.radii[i]);
    }
}

TEST_CASE("nesting holds along the schedule") {
    const auto pr = CoefficientProblem::make_free(0.0);
    const cplx lambda(0.5, 0.8);
    const auto sched = make_schedule(pr.interval, 2.0, 1.5, 7);
    const auto res = limit_disk(pr, pi / 2.0, 0.0, lambda, sched);
    for (std::size_t i = 0; i + 1 < res.xs.size(); ++i) {
        if (!std::isfinite(res.radii[i])) continue;
        const double lhs = std::abs(res.centers[i + 1] - res.centers[i]) + res.radii[i + 1];
        CHECK(lhs <= res.radii[i] + 1e-8);
    }
}

TEST_CASE("Nevanlinna analogue for alpha = 0") {
    // alpha = 0: every l in D_X satisfies Re[e^{i eta} l] >= 0
    const auto pr = CoefficientProblem::make_free(0.0);
    const cplx lambda(0.0, 2.0);
    const double eta = pi / 2.0;
    const auto f = frame_at(pr, lambda, eta, 4.0);
    const WeylDisk d = weyl_disk_from_frame(f, pr.alpha, eta, lambda);
    for (int k = 0; k < 32; ++k) {
        const cplx l = d.center + d.radius * std::polar(1.0, 2.0 * pi * k / 32.0);
        CHECK((std::polar(1.0, eta) * l).real() >= -1e-8);
    }
}

TEST_CASE("backcast recovers the decaying solution of the free problem") {
    const auto pr = CoefficientProblem::make_free(0.0);
    const cplx lambda(0.0, 1.0);
    const auto sched = make_schedule(pr.interval, 2.0, 1.5, 8);
    const auto res = limit_disk(pr, pi / 2.0, 0.0, lambda, sched);
    const auto frames = integrate_pair(pr, lambda, pi / 2.0, 0.0, sched.points);
    const std::size_t bi = pick_backcast_index(frames);

    std::vector<double> desc;
    for (double x = frames[bi].x; x > 1.0 - 1e-12; x -= 0.25) desc.push_back(x);
    if (desc.back() != 1.0) desc.push_back(1.0);
    const auto psi = backcast_psi(pr, lambda, pi / 2.0, frames[bi], res.m, desc);
    CHECK(psi.data_residual < 1e-8);

    const cplx s = sqrt_branch(lambda);
    for (const auto& p : psi.trace.pts) {
        const cplx want = std::exp(cplx(0.0, 1.0) * s * (p.x - 1.0));  // psi(a) = 1 for alpha = 0
        const cplx have =
            (p.value() * ScaledComplex(psi.trace.scale_factor, psi.trace.scale_log)).value();
        CHECK(std::abs(have - want) < 1e-8 * (1.0 + std::abs(want)));
    }
}
