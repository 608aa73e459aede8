#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace sims {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double inf = std::numeric_limits<double>::infinity();

// Input that cannot be parsed or violates a precondition.
struct input_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A numerical process failed its own consistency requirements
// (nesting violation, step underflow, inconclusive extrapolation, ...).
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline double sq(double v) { return v * v; }
inline double abs2(const cplx& z) { return z.real() * z.real() + z.imag() * z.imag(); }

// Principal-like argument mapped to [0, 2*pi).
inline double arg_02pi(const cplx& z) {
    double a = std::arg(z);
    if (a < 0.0) a += 2.0 * pi;
    return a;
}

// n-th root with the branch r^(1/n) e^(i theta/n), theta in [0, 2*pi).
inline cplx root_branch(const cplx& z, int n) {
    if (z == cplx(0.0, 0.0)) return {0.0, 0.0};
    const double r = std::pow(std::abs(z), 1.0 / n);
    const double t = arg_02pi(z) / n;
    return {r * std::cos(t), r * std::sin(t)};
}

inline cplx sqrt_branch(const cplx& z) { return root_branch(z, 2); }

// ---------------------------------------------------------------------------
// Scaled numbers: value = mantissa * exp(log_scale).  Used wherever solution
// magnitudes leave the double range (Liouville-Green growth is exponential).

struct ScaledReal {
    double m = 0.0;   // mantissa
    double e = 0.0;   // log scale

    ScaledReal() = default;
    ScaledReal(double mantissa, double log_scale) : m(mantissa), e(log_scale) { normalize(); }
    static ScaledReal from(double v) { return ScaledReal(v, 0.0); }

    void normalize() {
        if (m == 0.0 || !std::isfinite(m)) { e = 0.0; return; }
        const double am = std::abs(m);
        if (am > 1e8 || am < 1e-8) {
            e += std::log(am);
            m = std::copysign(1.0, m);
        }
    }

    double value() const {
        if (m == 0.0) return 0.0;
        if (!std::isfinite(m)) return m;
        const double t = e + std::log(std::abs(m));
        if (t > 700.0) return std::copysign(inf, m);
        if (t < -700.0) return std::copysign(0.0, m);
        return m * std::exp(e);
    }

    double log_abs() const {
        if (m == 0.0) return -inf;
        return e + std::log(std::abs(m));
    }

    ScaledReal operator*(const ScaledReal& o) const { return {m * o.m, e + o.e}; }
    ScaledReal operator/(const ScaledReal& o) const { return {m / o.m, e - o.e}; }

    ScaledReal operator+(const ScaledReal& o) const {
        if (m == 0.0) return o;
        if (o.m == 0.0) return *this;
        if (e >= o.e) {
            const double d = o.e - e;
            return {m + o.m * (d < -745.0 ? 0.0 : std::exp(d)), e};
        }
        return o + *this;
    }
    ScaledReal operator-() const { return {-m, e}; }
    ScaledReal operator-(const ScaledReal& o) const { return *this + (-o); }

    bool positive() const { return m > 0.0; }
};

struct ScaledComplex {
    cplx m{0.0, 0.0};
    double e = 0.0;

    ScaledComplex() = default;
    ScaledComplex(cplx mantissa, double log_scale) : m(mantissa), e(log_scale) { normalize(); }
    static ScaledComplex from(const cplx& v) { return ScaledComplex(v, 0.0); }

    void normalize() {
        const double am = std::abs(m);
        if (am == 0.0 || !std::isfinite(am)) { e = 0.0; return; }
        if (am > 1e8 || am < 1e-8) {
            e += std::log(am);
            m /= am;
        }
    }

    cplx value() const {
        const double am = std::abs(m);
        if (am == 0.0) return {0.0, 0.0};
        const double t = e + std::log(am);
        if (t > 700.0) return m / am * std::exp(700.0) * 1e300;  // saturate
        if (t < -745.0) return {0.0, 0.0};
        return m * std::exp(e);
    }

    ScaledComplex operator*(const ScaledComplex& o) const { return {m * o.m, e + o.e}; }
    ScaledComplex operator+(const ScaledComplex& o) const {
        if (m == cplx(0.0, 0.0)) return o;
        if (o.m == cplx(0.0, 0.0)) return *this;
        if (e >= o.e) {
            const double d = o.e - e;
            return {m + o.m * (d < -745.0 ? 0.0 : std::exp(d)), e};
        }
        return o + *this;
    }
    ScaledReal abs2_scaled() const { return {std::norm(m), 2.0 * e}; }
};

// ---------------------------------------------------------------------------
// Complex literals of the problem-file format: "re+imi" (also "re", "imi").

inline cplx parse_complex(const std::string& s0) {
    std::string s;
    for (char c : s0)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw input_error("empty complex literal");

    auto to_num = [](const std::string& t) -> double {
        if (t == "inf" || t == "+inf") return inf;
        if (t == "-inf") return -inf;
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(t, &pos);
        } catch (const std::exception&) {
            throw input_error("bad numeric literal '" + t + "'");
        }
        if (pos != t.size()) throw input_error("trailing characters in '" + t + "'");
        return v;
    };

    if (s.back() != 'i') return {to_num(s), 0.0};

    std::string body = s.substr(0, s.size() - 1);
    // split at the last top-level sign that is not an exponent sign
    std::size_t split = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        const char c = body[k];
        if ((c == '+' || c == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    if (split == std::string::npos) {
        std::string im = body;
        if (im.empty() || im == "+") im = "1";
        else if (im == "-") im = "-1";
        return {0.0, to_num(im)};
    }
    std::string re = body.substr(0, split);
    std::string im = body.substr(split);
    if (im == "+") im = "1";
    else if (im == "-") im = "-1";
    return {to_num(re), to_num(im)};
}

inline std::string format_complex(const cplx& z) {
    std::string re = std::to_string(z.real());
    std::string im = std::to_string(std::abs(z.imag()));
    return re + (z.imag() < 0 ? "-" : "+") + im + "i";
}

}  // namespace sims
