#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "ltiflow/errors.hpp"
#include "ltiflow/scalar.hpp"

namespace ltiflow {

/// Univariate polynomial in z over an exact field F, ascending coefficients.
/// The zero polynomial has an empty coefficient vector; otherwise there is no
/// trailing zero coefficient.
template <class F>
class Poly {
   public:
    Poly() = default;
    Poly(std::initializer_list<F> coeffs) : c_(coeffs) { trim(); }
    explicit Poly(std::vector<F> coeffs) : c_(std::move(coeffs)) { trim(); }
    Poly(const F& constant) : c_{constant} { trim(); }  // NOLINT(google-explicit-constructor)
    Poly(int constant) : c_{F(FieldOps<F>::from_int(constant))} { trim(); }  // NOLINT

    static Poly z() { return Poly{F(FieldOps<F>::from_int(0)), F(FieldOps<F>::from_int(1))}; }
    static Poly monomial(std::size_t k, const F& coeff = FieldOps<F>::from_int(1)) {
        std::vector<F> c(k + 1, F(FieldOps<F>::from_int(0)));
        c[k] = coeff;
        return Poly(std::move(c));
    }

    bool is_zero() const { return c_.empty(); }
    bool is_one() const { return c_.size() == 1 && c_[0] == F(FieldOps<F>::from_int(1)); }
    bool is_constant() const { return c_.size() <= 1; }
    /// Degree; -1 for the zero polynomial.
    int deg() const { return static_cast<int>(c_.size()) - 1; }

    const F& operator[](std::size_t i) const {
        static const F zero = FieldOps<F>::from_int(0);
        return i < c_.size() ? c_[i] : zero;
    }
    const std::vector<F>& coeffs() const { return c_; }
    const F& lead() const {
        if (c_.empty()) throw Error("leading coefficient of zero polynomial");
        return c_.back();
    }
    F constant_term() const { return (*this)[0]; }

    F eval(const F& x) const {
        F acc = FieldOps<F>::from_int(0);
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
        return acc;
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        std::vector<F> c(std::max(a.c_.size(), b.c_.size()), F(FieldOps<F>::from_int(0)));
        for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] = a.c_[i];
        for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
        return Poly(std::move(c));
    }
    friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }
    friend Poly operator-(const Poly& a) {
        std::vector<F> c = a.c_;
        for (auto& x : c) x = -x;
        return Poly(std::move(c));
    }
    friend Poly operator*(const Poly& a, const Poly& b) {
        if (a.is_zero() || b.is_zero()) return Poly();
        std::vector<F> c(a.c_.size() + b.c_.size() - 1, F(FieldOps<F>::from_int(0)));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        return Poly(std::move(c));
    }
    friend Poly operator*(const Poly& a, const F& s) { return a * Poly{s}; }
    friend Poly operator*(const F& s, const Poly& a) { return a * Poly{s}; }
    Poly& operator+=(const Poly& b) { return *this = *this + b; }
    Poly& operator-=(const Poly& b) { return *this = *this - b; }
    Poly& operator*=(const Poly& b) { return *this = *this * b; }

    friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
    friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

    /// Quotient and remainder; divisor must be nonzero.
    friend std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
        if (b.is_zero()) throw Error("polynomial division by zero");
        Poly rem = a;
        if (a.deg() < b.deg()) return {Poly(), rem};
        std::vector<F> q(a.c_.size() - b.c_.size() + 1, F(FieldOps<F>::from_int(0)));
        const F& lb = b.lead();
        while (!rem.is_zero() && rem.deg() >= b.deg()) {
            std::size_t shift = rem.deg() - b.deg();
            F coef = rem.lead() / lb;
            q[shift] = coef;
            std::vector<F> r = rem.c_;
            for (std::size_t i = 0; i < b.c_.size(); ++i) r[shift + i] -= coef * b.c_[i];
            r.pop_back();  // leading term cancels exactly
            rem = Poly(std::move(r));
        }
        return {Poly(std::move(q)), rem};
    }
    friend Poly operator/(const Poly& a, const Poly& b) {
        auto [q, r] = divmod(a, b);
        if (!r.is_zero()) throw Error("inexact polynomial division");
        return q;
    }
    friend Poly operator%(const Poly& a, const Poly& b) { return divmod(a, b).second; }

    Poly monic() const {
        if (is_zero()) return *this;
        std::vector<F> c = c_;
        const F lb = c.back();
        for (auto& x : c) x = x / lb;
        return Poly(std::move(c));
    }

    Poly derivative() const {
        if (c_.size() <= 1) return Poly();
        std::vector<F> c(c_.size() - 1);
        for (std::size_t i = 1; i < c_.size(); ++i)
            c[i - 1] = c_[i] * F(FieldOps<F>::from_int(static_cast<long>(i)));
        return Poly(std::move(c));
    }

    /// Substitute z -> s*z (scales root moduli by 1/|s|).
    Poly scale_arg(const F& s) const {
        std::vector<F> c = c_;
        F p = FieldOps<F>::from_int(1);
        for (std::size_t i = 1; i < c.size(); ++i) {
            p = p * s;
            c[i] = c[i] * p;
        }
        return Poly(std::move(c));
    }

    /// Coefficient-wise conjugate reversal: sum conj(a_{n-k}) z^k.
    Poly reverse_conj() const {
        std::vector<F> c(c_.rbegin(), c_.rend());
        for (auto& x : c) x = FieldOps<F>::conj(x);
        return Poly(std::move(c));
    }

    /// Multiplicity of the root z = 0.
    std::size_t order_at_zero() const {
        std::size_t k = 0;
        while (k < c_.size() && is_zero_coeff(c_[k])) ++k;
        return c_.empty() ? 0 : k;
    }
    Poly shift_down(std::size_t k) const {  // divide by z^k, exactness assumed
        if (k == 0) return *this;
        std::vector<F> c(c_.begin() + static_cast<long>(k), c_.end());
        return Poly(std::move(c));
    }

    std::string str(const std::string& var = "z") const {
        if (is_zero()) return "0";
        std::string out;
        for (std::size_t i = c_.size(); i-- > 0;) {
            if (is_zero_coeff(c_[i])) continue;
            if (!out.empty()) out += " + ";
            std::string cs = to_string(c_[i]);
            if (i == 0) {
                out += cs;
            } else {
                if (cs != "1") out += "(" + cs + ")*";
                out += var;
                if (i > 1) out += "^" + std::to_string(i);
            }
        }
        return out;
    }

   private:
    static bool is_zero_coeff(const F& x) { return FieldOps<F>::is_zero(x); }
    void trim() {
        while (!c_.empty() && is_zero_coeff(c_.back())) c_.pop_back();
    }
    std::vector<F> c_;
};

/// Monic gcd by the Euclidean algorithm; gcd(0,0) = 0.
template <class F>
Poly<F> gcd(const Poly<F>& a, const Poly<F>& b) {
    Poly<F> x = a, y = b;
    while (!y.is_zero()) {
        auto r = x % y;
        x = y;
        y = r;
    }
    return x.monic();
}

template <class F>
Poly<F> lcm(const Poly<F>& a, const Poly<F>& b) {
    if (a.is_zero() || b.is_zero()) return Poly<F>();
    return ((a * b) / gcd(a, b)).monic();
}

}  // namespace ltiflow
