#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "sims/rangegeom.hpp"

using namespace sims;
using Catch::Approx;

namespace {

// Brute-force oracle: delta(eta) = min over raw samples {q/w + r p} of
// Re[(z - lambda0) e^{i eta}], maximized over a dense eta grid.  Independent
// of the hull/cone machinery.
struct PairOracle {
    double eta = 0.0, delta = -inf;
};

PairOracle oracle_pair(const CoefficientProblem& pr, const cplx& lambda0, double x_hi) {
    std::vector<cplx> samples;
    for (int i = 0; i < 400; ++i) {
        const double lo = pr.interval.a + 1e-6;
        const double x = lo * std::pow(x_hi / lo, i / 399.0);
        if (!(x < pr.interval.b)) break;
        const Coeffs c = pr.evaluate_unchecked(x);
        for (int j = 0; j < 200; ++j) {
            const double r = std::pow(10.0, -6.0 + 13.0 * j / 199.0);
            samples.push_back(c.q / c.w + r * c.p);
        }
    }
    PairOracle best;
    for (int k = 0; k < 100000; ++k) {
        const double eta = -pi + 2.0 * pi * k / 100000.0;
        const cplx ei = std::polar(1.0, eta);
        double dmin = inf;
        for (const cplx& z : samples) dmin = std::min(dmin, ((z - lambda0) * ei).real());
        if (dmin > best.delta) {
            best.delta = dmin;
            best.eta = eta;
        }
    }
    return best;
}

CoefficientProblem figure_family(double phi, double q1, double q2, double b1, double b2,
                                 double omega, const cplx& alpha) {
    PowerLawParams pl;
    pl.p1 = std::cos(phi);
    pl.p2 = std::sin(phi);
    pl.a1 = pl.a2 = 0.0;
    pl.q1 = q1;
    pl.q2 = q2;
    pl.b1 = b1;
    pl.b2 = b2;
    pl.omega = omega;
    return CoefficientProblem::make_power_law(pl, alpha);
}

}  // namespace

TEST_CASE("free problem region: single vertex plus one ray") {
    const auto pr = CoefficientProblem::make_free(0.0);
    const auto r = build_region(pr);
    REQUIRE(r.vertices.size() == 1);
    CHECK(std::abs(r.vertices[0]) < 1e-12);
    REQUIRE(r.recession_dirs.size() == 1);
    CHECK(std::abs(r.recession_dirs[0] - cplx(1.0, 0.0)) < 1e-12);

    CHECK(r.contains(cplx(3.0, 0.0)));
    CHECK(r.contains(cplx(0.0, 0.0)));
    CHECK_FALSE(r.contains(cplx(-0.5, 0.0)));
    CHECK_FALSE(r.contains(cplx(1.0, 0.5)));
}

TEST_CASE("oscillator sector region") {
    const double argc = pi / 3.0;
    const auto pr = CoefficientProblem::make_oscillator(std::polar(1.0, argc), 2.0, pi / 2.0);
    const auto r = build_region(pr);
    // sector {0 <= arg z <= arg c}
    CHECK(r.contains(std::polar(2.0, 0.1)));
    CHECK(r.contains(std::polar(50.0, argc - 0.05)));
    CHECK(r.contains(cplx(1.0, 0.0)));
    CHECK_FALSE(r.contains(std::polar(2.0, argc + 0.2)));
    CHECK_FALSE(r.contains(std::polar(2.0, -0.2)));
    CHECK_FALSE(r.contains(cplx(-1.0, 0.0)));
}

TEST_CASE("oscillator with arg c = pi: the region is the real line") {
    const auto pr = CoefficientProblem::make_oscillator(cplx(-1.0, 0.0), 2.0, pi / 2.0);
    const auto r = build_region(pr);
    CHECK(r.contains(cplx(5.0, 0.0)));
    CHECK(r.contains(cplx(-100.0, 0.0)));
    CHECK_FALSE(r.contains(cplx(0.0, 0.5)));
    CHECK_FALSE(r.contains(cplx(0.0, -0.5)));
}

TEST_CASE("admissible pair on the half-line region") {
    const auto pr = CoefficientProblem::make_free(0.0);
    const auto r = build_region(pr);
    const auto p = admissible_pair(r, cplx(0.0, 1.0));
    CHECK(p.eta == Approx(pi / 2.0).margin(1e-6));
    CHECK(std::abs(p.K) < 1e-6);
    CHECK(p.delta == Approx(1.0).epsilon(1e-9));

    // brute-force oracle agreement
    const auto oracle = oracle_pair(pr, cplx(0.0, 1.0), 1e5);
    CHECK(p.delta == Approx(oracle.delta).epsilon(1e-3));
    CHECK(p.eta == Approx(oracle.eta).margin(1e-3));
}

TEST_CASE("admissible pair for the quarter-plane sector at lambda0 = -1") {
    // Q = sector {0 <= arg z <= pi/2} from the oscillator with arg c = pi/2
    const auto pr = CoefficientProblem::make_oscillator(cplx(0.0, 1.0), 2.0, pi / 2.0);
    const auto r = build_region(pr);
    const auto p = admissible_pair(r, cplx(-1.0, 0.0));
    CHECK(std::abs(p.K) < 1e-6);
    CHECK(p.delta == Approx(1.0).epsilon(1e-6));

    const auto oracle = oracle_pair(pr, cplx(-1.0, 0.0), 1e5);
    CHECK(p.delta == Approx(oracle.delta).epsilon(1e-3));
    CHECK(p.eta == Approx(oracle.eta).margin(2e-3));

    // the rotation satisfies the half-plane conditions stated for this case
    CHECK((std::polar(1.0, p.eta)).real() >= -1e-9);
    CHECK((cplx(0.0, 1.0) * std::polar(1.0, p.eta)).real() >= -1e-9);
    CHECK((cplx(-1.0, 0.0) * std::polar(1.0, p.eta) - p.K * std::polar(1.0, p.eta)).real() < 0.0);
}

TEST_CASE("admissible pair for the pi/3 sector at lambda = i") {
    const auto pr =
        CoefficientProblem::make_oscillator(std::polar(1.0, pi / 3.0), 2.0, pi / 2.0);
    const auto p = admissible_pair(build_region(pr), cplx(0.0, 1.0));
    // nearest point of the upper edge ray to i, rotated by pi/6
    CHECK(p.eta == Approx(pi / 6.0).margin(1e-6));
    CHECK(std::abs(p.K - std::polar(std::sqrt(3.0) / 2.0, pi / 3.0)) < 1e-6);
    CHECK(p.delta == Approx(0.5).epsilon(1e-6));
}

TEST_CASE("lambda0 inside the region is rejected") {
    const auto pr = CoefficientProblem::make_free(0.0);
    const auto r = build_region(pr);
    CHECK_THROWS_AS(admissible_pair(r, cplx(1.0, 0.0)), input_error);
    CHECK_THROWS_AS(admissible_pair(r, cplx(0.0, 0.0)), input_error);
}

TEST_CASE("returned pair satisfies the half-plane inequality on probe points") {
    const auto pr =
        CoefficientProblem::make_oscillator(std::polar(1.0, 2.0), 1.5, cplx(0.2, 0.1));
    const auto r = build_region(pr);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-4.0, 4.0);
    int tested = 0;
    while (tested < 20) {
        const cplx l0(u(rng), u(rng));
        if (r.contains(l0, 1e-9) || r.outer_slack(l0) < 0.05) continue;
        ++tested;
        const auto p = admissible_pair(r, l0);
        const cplx ei = std::polar(1.0, p.eta);
        for (const cplx& v : r.vertices)
            CHECK(((v - p.K) * ei).real() >= -1e-7 * (1.0 + std::abs(v)));
        for (const cplx& d : r.recession_dirs) CHECK((d * ei).real() >= -1e-9);

        // delta equals the distance from lambda0 to the half-plane boundary
        const cplx proj = l0 - ((l0 - p.K) * ei).real() * std::conj(ei);
        CHECK(std::abs(l0 - proj) == Approx(p.delta).epsilon(1e-9));
        CHECK(((proj - p.K) * ei).real() == Approx(0.0).margin(1e-9));
    }
}

TEST_CASE("alpha constraint") {
    CHECK(satisfies_alpha(0.7, cplx(0.0, 0.0)));
    CHECK(satisfies_alpha(-2.1, cplx(0.0, 0.0)));

    // real alpha in (0, pi/2): eta = pi passes, eta = 0 fails
    CHECK(satisfies_alpha(pi, cplx(0.6, 0.0)));
    CHECK_FALSE(satisfies_alpha(0.0, cplx(0.6, 0.0)));
}

TEST_CASE("Q(alpha) tables for the first figure configuration") {
    // 0 < phi < pi/2, q1 < 0, q2 <= 0, b2 > b1 > omega
    const double phi = pi / 4.0;
    const auto mk = [&](const cplx& alpha) {
        return figure_family(phi, -1.0, -1.0, 1.0, 2.0, 0.0, alpha);
    };
    const auto region = build_region(mk(0.0));

    std::vector<cplx> probes;
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-8.0, 8.0);
    while (probes.size() < 60) {
        const cplx z(u(rng), u(rng));
        const double slack = region.outer_slack(z, 512);
        if (std::abs(slack) < 0.3) continue;  // margin from the boundary
        probes.push_back(z);
    }

    // alpha in [-pi/2, 0] u [pi/2, pi]: Q(alpha) = Q
    for (const double alpha : {-0.8, 2.0, 0.0, -pi / 2.0}) {
        for (const cplx& z : probes) {
            const bool in_q = region.contains(z);
            CHECK(q_alpha_member(region, alpha, z) == in_q);
        }
    }
    // alpha in (-pi, -pi/2) u (0, pi/2): Q(alpha) = C
    for (const double alpha : {0.7, -2.0}) {
        for (const cplx& z : probes) CHECK(q_alpha_member(region, alpha, z));
    }
}

TEST_CASE("Q(alpha) for the real-line oscillator") {
    const auto pr = CoefficientProblem::make_oscillator(cplx(-1.0, 0.0), 2.0, pi / 3.0);
    const auto region = build_region(pr);
    // real alpha: Q(alpha) = R
    CHECK(q_alpha_member(region, pi / 3.0, cplx(1.0, 0.0)));
    CHECK(q_alpha_member(region, pi / 3.0, cplx(-7.0, 0.0)));
    CHECK_FALSE(q_alpha_member(region, pi / 3.0, cplx(0.0, 1.0)));
    CHECK_FALSE(q_alpha_member(region, pi / 3.0, cplx(2.0, -0.4)));
}

TEST_CASE("Q(alpha) contains Q, with equality at alpha = 0 and pi/2") {
    const auto pr =
        CoefficientProblem::make_oscillator(std::polar(1.0, pi / 3.0), 2.0, pi / 2.0);
    const auto region = build_region(pr);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int k = 0; k < 200; ++k) {
        const cplx z(u(rng), u(rng));
        const double slack = region.outer_slack(z, 512);
        if (std::abs(slack) < 0.2) continue;
        const bool in_q = region.contains(z);
        if (in_q) {
            CHECK(q_alpha_member(region, cplx(0.3, -0.2), z));  // any alpha: superset
        }
        CHECK(q_alpha_member(region, 0.0, z) == in_q);
        CHECK(q_alpha_member(region, pi / 2.0, z) == in_q);
    }
}

TEST_CASE("Q_c monotone: restricting the interval shrinks the region") {
    const auto pr = CoefficientProblem::make_oscillator(cplx(0.0, 1.0), 2.0, pi / 2.0);
    const auto r2 = build_region(pr.restricted(2.0));
    const auto r4 = build_region(pr.restricted(4.0));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    for (int k = 0; k < 300; ++k) {
        const cplx z(u(rng), std::abs(u(rng)));
        if (std::abs(r4.outer_slack(z, 512)) < 0.5) continue;
        if (r4.contains(z)) CHECK(r2.contains(z));
    }
}

TEST_CASE("Q_b for the oscillator family") {
    // arg c != pi: intersection recedes to the empty set
    {
        const auto pr = CoefficientProblem::make_oscillator(cplx(0.0, 1.0), 2.0, pi / 2.0);
        const auto sched = make_schedule(pr.interval, 2.0, 2.0, 6);
        const auto qb = q_b_region(pr, pr.alpha, sched);
        CHECK(qb.region.empty());
        CHECK(qb.receding);
    }
    // arg c = pi: Q_b(alpha) = R
    {
        const auto pr = CoefficientProblem::make_oscillator(cplx(-1.0, 0.0), 2.0, pi / 2.0);
        const auto sched = make_schedule(pr.interval, 2.0, 2.0, 6);
        const auto qb = q_b_region(pr, pr.alpha, sched);
        REQUIRE_FALSE(qb.region.empty());
        CHECK(qb.region.contains(cplx(17.0, 0.0)));
        CHECK(qb.region.contains(cplx(-3.0, 0.0)));
        CHECK_FALSE(qb.region.contains(cplx(0.0, 0.3)));
        CHECK_FALSE(qb.region.contains(cplx(0.0, -0.3)));
    }
    // free problem: Q_c = [0, inf) for every c
    {
        const auto pr = CoefficientProblem::make_free(0.0);
        const auto sched = make_schedule(pr.interval, 2.0, 2.0, 5);
        const auto qb = q_b_region(pr, 0.0, sched);
        REQUIRE_FALSE(qb.region.empty());
        CHECK(qb.region.contains(cplx(4.0, 0.0)));
        CHECK_FALSE(qb.region.contains(cplx(-1.0, 0.0)));
        CHECK_FALSE(qb.region.contains(cplx(1.0, 1.0)));
    }
}
