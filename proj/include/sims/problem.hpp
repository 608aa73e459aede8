#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sims/core.hpp"

namespace sims {

// Interval [a, b) with a regular and b possibly singular (b = inf allowed).
struct Interval {
    double a = 1.0;
    double b = inf;

    bool infinite() const { return std::isinf(b); }

    void validate() const {
        if (!std::isfinite(a)) throw input_error("interval: left endpoint must be finite");
        if (!(a < b)) throw input_error("interval: need a < b");
    }
};

// Power-law coefficients on [1, inf):
//   p(x) = p1 x^a1 + i p2 x^a2,  q(x) = q1 x^b1 + i q2 x^b2,  w(x) = x^omega.
struct PowerLawParams {
    double p1 = 1.0, p2 = 0.0, a1 = 0.0, a2 = 0.0;
    double q1 = 0.0, q2 = 0.0, b1 = 0.0, b2 = 0.0;
    double omega = 0.0;

    void validate() const {
        // p1 x^a1 and p2 x^a2 are the real and imaginary parts separately, so
        // p(x) = 0 for some x >= 1 exactly when both amplitudes vanish.
        if (p1 == 0.0 && p2 == 0.0)
            throw input_error("power-law: p vanishes identically (p1 = p2 = 0)");
    }
};

enum class Family { Free, PowerLaw, OscillatorSector, Tabulated };

inline const char* family_name(Family f) {
    switch (f) {
        case Family::Free: return "free";
        case Family::PowerLaw: return "powerlaw";
        case Family::OscillatorSector: return "oscillator";
        case Family::Tabulated: return "tabulated";
    }
    return "?";
}

struct Coeffs {
    cplx p;
    cplx q;
    double w;
};

// A coefficient problem: the triple (p, q, w) on [a, b) plus the boundary
// parameter alpha.  Evaluators are pure; instances are immutable after
// construction and safe to share across threads.
class CoefficientProblem {
  public:
    Interval interval;
    cplx alpha{0.0, 0.0};
    Family family = Family::Tabulated;
    PowerLawParams power;       // valid when family == PowerLaw
    cplx osc_c{0.0, 0.0};       // valid when family == OscillatorSector
    double osc_beta = 0.0;

    using Evaluator = std::function<cplx(double)>;
    using RealEvaluator = std::function<double(double)>;

    CoefficientProblem() = default;

    Coeffs evaluate(double x) const {
        if (!(x >= interval.a) || !(x < interval.b))
            throw input_error("evaluate: x = " + std::to_string(x) + " outside [a, b)");
        return evaluate_unchecked(x);
    }

    Coeffs evaluate_unchecked(double x) const {
        Coeffs c;
        c.p = p_(x);
        c.q = q_(x);
        c.w = w_(x);
        return c;
    }

    // Unit directions along which q/w escapes to infinity (empty if bounded).
    // Exact for the built-in families, tail-detected for tabulated ones.
    const std::vector<cplx>& curve_escape_directions() const { return escape_dirs_; }

    // Same problem with the left endpoint moved to c (used by the truncated
    // problems behind the meromorphic continuation).
    CoefficientProblem restricted(double c) const {
        if (!(c > interval.a) || !(c < interval.b))
            throw input_error("restricted: c outside (a, b)");
        CoefficientProblem r(*this);
        r.interval.a = c;
        return r;
    }

    CoefficientProblem with_alpha(const cplx& a) const {
        CoefficientProblem r(*this);
        r.alpha = a;
        return r;
    }

    static CoefficientProblem make_free(const cplx& alpha, Interval iv = {1.0, inf}) {
        CoefficientProblem pr;
        pr.interval = iv;
        pr.interval.validate();
        pr.alpha = alpha;
        pr.family = Family::Free;
        pr.p_ = [](double) { return cplx(1.0, 0.0); };
        pr.q_ = [](double) { return cplx(0.0, 0.0); };
        pr.w_ = [](double) { return 1.0; };
        return pr;
    }

    static CoefficientProblem make_power_law(const PowerLawParams& params, const cplx& alpha) {
        params.validate();
        CoefficientProblem pr;
        pr.interval = {1.0, inf};
        pr.alpha = alpha;
        pr.family = Family::PowerLaw;
        pr.power = params;
        const PowerLawParams pl = params;
        pr.p_ = [pl](double x) {
            return cplx(pl.p1 * std::pow(x, pl.a1), pl.p2 * std::pow(x, pl.a2));
        };
        pr.q_ = [pl](double x) {
            return cplx(pl.q1 * std::pow(x, pl.b1), pl.q2 * std::pow(x, pl.b2));
        };
        pr.w_ = [pl](double x) { return std::pow(x, pl.omega); };
        // Dominant escape direction of q/w = q1 x^(b1-w) + i q2 x^(b2-w).
        // Only the leading term contributes a recession direction of the hull;
        // subdominant drift is curvature and is covered by the sampled hull.
        const double e1 = (pl.q1 != 0.0) ? pl.b1 - pl.omega : -inf;
        const double e2 = (pl.q2 != 0.0) ? pl.b2 - pl.omega : -inf;
        const double emax = std::max(e1, e2);
        if (emax > 0.0) {
            cplx dir{e1 == emax ? pl.q1 : 0.0, e2 == emax ? pl.q2 : 0.0};
            pr.escape_dirs_.push_back(dir / std::abs(dir));
        }
        pr.check_grid();
        return pr;
    }

    // -y'' + c x^beta y on [0, inf).
    static CoefficientProblem make_oscillator(const cplx& c, double beta, const cplx& alpha) {
        CoefficientProblem pr;
        pr.interval = {0.0, inf};
        pr.alpha = alpha;
        pr.family = Family::OscillatorSector;
        pr.osc_c = c;
        pr.osc_beta = beta;
        pr.p_ = [](double) { return cplx(1.0, 0.0); };
        pr.q_ = [c, beta](double x) { return c * std::pow(x, beta); };
        pr.w_ = [](double) { return 1.0; };
        if (c != cplx(0.0, 0.0) && beta > 0.0) pr.escape_dirs_.push_back(c / std::abs(c));
        pr.check_grid();
        return pr;
    }

    static CoefficientProblem make_tabulated(Interval iv, Evaluator p, Evaluator q,
                                             RealEvaluator w, const cplx& alpha) {
        iv.validate();
        CoefficientProblem pr;
        pr.interval = iv;
        pr.alpha = alpha;
        pr.family = Family::Tabulated;
        pr.p_ = std::move(p);
        pr.q_ = std::move(q);
        pr.w_ = std::move(w);
        pr.check_grid();
        pr.detect_escape_dirs();
        return pr;
    }

  private:
    Evaluator p_, q_;
    RealEvaluator w_;
    std::vector<cplx> escape_dirs_;

    // w > 0 and p != 0 probed on a 1000-point log-ish grid across the interval.
    void check_grid() const {
        const double a = interval.a;
        const double hi = interval.infinite() ? std::max(1.0, std::abs(a)) * 1e6
                                              : interval.b - 1e-9 * (interval.b - a);
        for (int k = 0; k < 1000; ++k) {
            const double t = k / 999.0;
            double x;
            if (interval.infinite()) {
                const double lo = a + 1e-9 * (1.0 + std::abs(a));
                x = lo * std::pow(hi / std::max(lo, 1e-12), t);
                if (lo <= 0.0) x = a + t * t * (hi - a) + 1e-12;
            } else {
                x = a + t * (hi - a);
            }
            if (x < a || x >= interval.b) continue;
            const Coeffs c = evaluate_unchecked(x);
            if (!(c.w > 0.0))
                throw input_error("coefficient check: w(x) <= 0 at x = " + std::to_string(x));
            if (c.p == cplx(0.0, 0.0))
                throw input_error("coefficient check: p(x) = 0 at x = " + std::to_string(x));
        }
    }

    void detect_escape_dirs() {
        // tail heuristic: growing |q/w| over the last decade of a sample grid
        if (!interval.infinite()) return;
        const double a = std::max(interval.a, 1e-6);
        std::vector<cplx> tail;
        double prev = 0.0;
        bool growing = true;
        for (int k = 0; k <= 24; ++k) {
            const double x = std::max(interval.a + 1e-9, a * std::pow(2.0, k));
            const Coeffs c = evaluate_unchecked(x);
            const cplx z = c.q / c.w;
            const double m = std::abs(z);
            if (k >= 20) {
                tail.push_back(z);
                if (m < 2.0 * prev) growing = false;
            }
            prev = m;
        }
        if (growing && std::abs(tail.back()) > 1e3)
            escape_dirs_.push_back(tail.back() / std::abs(tail.back()));
    }
};

// Strictly increasing truncation points X0 < ... < X_N approaching b.
struct TruncationSchedule {
    std::vector<double> points;

    double last() const { return points.back(); }
};

inline TruncationSchedule make_schedule(const Interval& iv, double x0, double ratio, int count) {
    iv.validate();
    if (!(x0 > iv.a) || !(x0 < iv.b)) throw input_error("schedule: X0 outside (a, b)");
    if (count < 2) throw input_error("schedule: count must be >= 2");
    TruncationSchedule s;
    s.points.reserve(static_cast<std::size_t>(count));
    if (iv.infinite()) {
        if (!(ratio > 1.0)) throw input_error("schedule: ratio must be > 1 for b = inf");
        for (int k = 0; k < count; ++k) s.points.push_back(x0 * std::pow(ratio, k));
    } else {
        if (!(ratio > 0.0 && ratio < 1.0))
            throw input_error("schedule: ratio must be in (0, 1) for finite b");
        for (int k = 0; k < count; ++k)
            s.points.push_back(iv.b - (iv.b - x0) * std::pow(ratio, k));
    }
    return s;
}

// ---------------------------------------------------------------------------
// Problem definition files: UTF-8 lines of `key = value`.

struct ProblemFile {
    CoefficientProblem problem;
    std::optional<TruncationSchedule> schedule;
    double schedule_x0 = 0.0, schedule_ratio = 0.0;
    int schedule_count = 0;
};

inline ProblemFile parse_problem_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r\n");
            const auto e = s.find_last_not_of(" \t\r\n");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw input_error("problem file line " + std::to_string(lineno) + ": expected key = value");
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }

    auto take = [&kv](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto take_real = [&take](const std::string& key, std::optional<double> dflt) -> double {
        auto v = take(key);
        if (!v) {
            if (dflt) return *dflt;
            throw input_error("problem file: missing key '" + key + "'");
        }
        if (*v == "inf") return inf;
        const cplx z = parse_complex(*v);
        if (z.imag() != 0.0) throw input_error("problem file: key '" + key + "' must be real");
        return z.real();
    };
    auto take_cplx = [&take](const std::string& key, std::optional<cplx> dflt) -> cplx {
        auto v = take(key);
        if (!v) {
            if (dflt) return *dflt;
            throw input_error("problem file: missing key '" + key + "'");
        }
        return parse_complex(*v);
    };

    auto fam = take("family");
    if (!fam) throw input_error("problem file: missing key 'family'");
    const cplx alpha = take_cplx("alpha", cplx(0.0, 0.0));

    ProblemFile out;
    if (*fam == "free") {
        Interval iv{take_real("interval.a", 1.0), take_real("interval.b", inf)};
        out.problem = CoefficientProblem::make_free(alpha, iv);
    } else if (*fam == "powerlaw") {
        PowerLawParams pl;
        pl.p1 = take_real("p1", 1.0);
        pl.p2 = take_real("p2", 0.0);
        pl.a1 = take_real("a1", 0.0);
        pl.a2 = take_real("a2", 0.0);
        pl.q1 = take_real("q1", 0.0);
        pl.q2 = take_real("q2", 0.0);
        pl.b1 = take_real("b1", 0.0);
        pl.b2 = take_real("b2", 0.0);
        pl.omega = take_real("omega", 0.0);
        (void)take_real("interval.a", 1.0);
        (void)take_real("interval.b", inf);
        out.problem = CoefficientProblem::make_power_law(pl, alpha);
    } else if (*fam == "oscillator") {
        const cplx c = take_cplx("c", std::nullopt);
        const double beta = take_real("beta", std::nullopt);
        (void)take_real("interval.a", 0.0);
        (void)take_real("interval.b", inf);
        out.problem = CoefficientProblem::make_oscillator(c, beta, alpha);
    } else {
        throw input_error("problem file: unknown family '" + *fam + "'");
    }

    const bool has_sched = kv.count("schedule.x0") || kv.count("schedule.ratio") ||
                           kv.count("schedule.count");
    if (has_sched) {
        out.schedule_x0 = take_real("schedule.x0", std::nullopt);
        out.schedule_ratio = take_real("schedule.ratio", std::nullopt);
        out.schedule_count = static_cast<int>(take_real("schedule.count", std::nullopt));
        out.schedule =
            make_schedule(out.problem.interval, out.schedule_x0, out.schedule_ratio, out.schedule_count);
    }

    if (!kv.empty()) throw input_error("problem file: unknown key '" + kv.begin()->first + "'");
    return out;
}

inline ProblemFile load_problem_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw input_error("cannot open problem file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_problem_text(ss.str());
}

}  // namespace sims
