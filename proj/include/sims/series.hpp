#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "sims/core.hpp"

namespace sims {

// Finite asymptotic sums  sum_k c_k x^{e_k}  with real exponents in
// descending order, used to expand coefficient ratios at infinity.
// Products and roots are truncated to a bounded number of terms and a
// bounded exponent span below the leading term.
class PowerSum {
  public:
    struct Term {
        double expo;
        cplx coef;
    };

    static constexpr std::size_t max_terms = 14;
    static constexpr double max_span = 40.0;

    PowerSum() = default;
    static PowerSum monomial(const cplx& c, double e) {
        PowerSum s;
        if (c != cplx(0.0, 0.0)) s.terms_.push_back({e, c});
        return s;
    }

    const std::vector<Term>& terms() const { return terms_; }
    bool zero() const { return terms_.empty(); }
    double leading_expo() const {
        if (zero()) throw numeric_error("power sum: leading exponent of zero");
        return terms_.front().expo;
    }
    cplx leading_coef() const {
        if (zero()) throw numeric_error("power sum: leading coefficient of zero");
        return terms_.front().coef;
    }

    PowerSum operator+(const PowerSum& o) const {
        PowerSum r;
        r.terms_.reserve(terms_.size() + o.terms_.size());
        std::size_t i = 0, j = 0;
        while (i < terms_.size() || j < o.terms_.size()) {
            if (j == o.terms_.size() ||
                (i < terms_.size() && terms_[i].expo > o.terms_[j].expo + expo_tol)) {
                r.terms_.push_back(terms_[i++]);
            } else if (i == terms_.size() || o.terms_[j].expo > terms_[i].expo + expo_tol) {
                r.terms_.push_back(o.terms_[j++]);
            } else {
                r.terms_.push_back({terms_[i].expo, terms_[i].coef + o.terms_[j].coef});
                ++i;
                ++j;
            }
        }
        r.trim();
        return r;
    }

    PowerSum operator*(const PowerSum& o) const {
        PowerSum r;
        for (const Term& a : terms_)
            for (const Term& b : o.terms_) {
                PowerSum t;
                t.terms_.push_back({a.expo + b.expo, a.coef * b.coef});
                r = r + t;
            }
        r.trim();
        return r;
    }

    PowerSum scaled(const cplx& c) const {
        PowerSum r(*this);
        for (Term& t : r.terms_) t.coef *= c;
        r.trim();
        return r;
    }

    PowerSum conjugated() const {  // valid for x real positive
        PowerSum r(*this);
        for (Term& t : r.terms_) t.coef = std::conj(t.coef);
        return r;
    }

    // 1 / this, expanded around the leading term.
    PowerSum reciprocal(int orders = 8) const {
        if (zero()) throw numeric_error("power sum: reciprocal of zero");
        const Term lead = terms_.front();
        PowerSum u = tail_over_lead();
        PowerSum acc = monomial(1.0, 0.0);
        PowerSum upow = monomial(1.0, 0.0);
        double sign = 1.0;
        for (int j = 1; j <= orders; ++j) {
            upow = upow * u;
            sign = -sign;
            if (upow.zero()) break;
            acc = acc + upow.scaled(sign);
        }
        return acc * monomial(1.0 / lead.coef, -lead.expo);
    }

    // Square root with the branch r^{1/2} e^{i theta/2}, theta in [0, 2 pi).
    PowerSum root(int orders = 8) const {
        if (zero()) throw numeric_error("power sum: root of zero");
        const Term lead = terms_.front();
        static const double binom[] = {1.0,          0.5,           -1.0 / 8.0,  1.0 / 16.0,
                                       -5.0 / 128.0, 7.0 / 256.0,   -21.0 / 1024.0,
                                       33.0 / 2048.0, -429.0 / 32768.0};
        PowerSum u = tail_over_lead();
        PowerSum acc = monomial(1.0, 0.0);
        PowerSum upow = monomial(1.0, 0.0);
        const int maxj = std::min<int>(orders, 8);
        for (int j = 1; j <= maxj; ++j) {
            upow = upow * u;
            if (upow.zero()) break;
            acc = acc + upow.scaled(binom[j]);
        }
        return acc * monomial(sqrt_branch(lead.coef), lead.expo / 2.0);
    }

    // |this| = sqrt(this * conj(this)); leading coefficient becomes |c|.
    PowerSum magnitude() const { return ((*this) * conjugated()).root(); }

    PowerSum real_part() const {
        PowerSum r;
        for (const Term& t : terms_)
            if (t.coef.real() != 0.0) r.terms_.push_back({t.expo, {t.coef.real(), 0.0}});
        return r;
    }

    // First term whose real part survives cancellation; nullptr-like flag if none.
    bool leading_real_term(double& expo, double& coef, double rel_tol = 1e-11) const {
        double scale = 0.0;
        for (const Term& t : terms_) scale = std::max(scale, std::abs(t.coef));
        for (const Term& t : terms_) {
            if (std::abs(t.coef.real()) > rel_tol * std::max(1.0, scale)) {
                expo = t.expo;
                coef = t.coef.real();
                return true;
            }
        }
        return false;
    }

    cplx evaluate(double x) const {
        cplx v{0.0, 0.0};
        for (const Term& t : terms_) v += t.coef * std::pow(x, t.expo);
        return v;
    }

  private:
    static constexpr double expo_tol = 1e-11;
    std::vector<Term> terms_;

    PowerSum tail_over_lead() const {
        const Term lead = terms_.front();
        PowerSum u;
        for (std::size_t k = 1; k < terms_.size(); ++k)
            u.terms_.push_back({terms_[k].expo - lead.expo, terms_[k].coef / lead.coef});
        return u;
    }

    void trim() {
        std::vector<Term> kept;
        for (const Term& t : terms_) {
            if (std::abs(t.coef) < 1e-300) continue;
            kept.push_back(t);
        }
        terms_ = std::move(kept);
        if (terms_.empty()) return;
        const double cutoff = terms_.front().expo - max_span;
        while (!terms_.empty() && terms_.back().expo < cutoff) terms_.pop_back();
        if (terms_.size() > max_terms) terms_.resize(max_terms);
        // drop coefficients destroyed by cancellation relative to the scale
        double scale = 0.0;
        for (const Term& t : terms_) scale = std::max(scale, std::abs(t.coef));
        std::vector<Term> out;
        for (const Term& t : terms_)
            if (std::abs(t.coef) > 1e-14 * scale) out.push_back(t);
        terms_ = std::move(out);
    }
};

}  // namespace sims
