#pragma once

#include <string>
#include <utility>

#include "ltiflow/poly.hpp"

namespace ltiflow {

/// Rational function num/den over F, kept gcd-reduced with a monic denominator.
template <class F>
class RatFn {
   public:
    RatFn() : num_(), den_(Poly<F>{FieldOps<F>::from_int(1)}) {}
    RatFn(int v) : RatFn(Poly<F>(v)) {}  // NOLINT(google-explicit-constructor)
    RatFn(const F& v) : RatFn(Poly<F>(v)) {}  // NOLINT(google-explicit-constructor)
    RatFn(Poly<F> num) : num_(std::move(num)), den_(Poly<F>{FieldOps<F>::from_int(1)}) {}  // NOLINT
    RatFn(Poly<F> num, Poly<F> den) : num_(std::move(num)), den_(std::move(den)) { reduce(); }

    static RatFn z() { return RatFn(Poly<F>::z()); }

    const Poly<F>& num() const { return num_; }
    const Poly<F>& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_constant() const { return num_.is_constant() && den_.is_one(); }
    bool is_polynomial() const { return den_.is_one(); }
    /// deg(num) <= deg(den); the zero function is causal.
    bool is_causal() const { return num_.is_zero() || num_.deg() <= den_.deg(); }
    F constant_value() const {
        if (!is_constant()) throw NonConstantEntries("rational function is not constant");
        return num_.constant_term();
    }

    bool has_pole_at(const F& x) const { return FieldOps<F>::is_zero(den_.eval(x)); }
    F eval(const F& x) const {
        F d = den_.eval(x);
        if (FieldOps<F>::is_zero(d)) throw Error("evaluation at a pole");
        return num_.eval(x) / d;
    }

    friend RatFn operator+(const RatFn& a, const RatFn& b) {
        return RatFn(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RatFn operator-(const RatFn& a, const RatFn& b) {
        return RatFn(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RatFn operator-(const RatFn& a) { return RatFn(-a.num_, a.den_, no_reduce_tag{}); }
    friend RatFn operator*(const RatFn& a, const RatFn& b) {
        // cross-reduce before multiplying to curb degree growth
        Poly<F> g1 = gcd(a.num_, b.den_), g2 = gcd(b.num_, a.den_);
        Poly<F> n = (g1.is_one() ? a.num_ : a.num_ / g1) * (g2.is_one() ? b.num_ : b.num_ / g2);
        Poly<F> d = (g2.is_one() ? a.den_ : a.den_ / g2) * (g1.is_one() ? b.den_ : b.den_ / g1);
        return RatFn(std::move(n), std::move(d));
    }
    friend RatFn operator/(const RatFn& a, const RatFn& b) {
        if (b.is_zero()) throw Error("division by zero rational function");
        return a * RatFn(b.den_, b.num_);
    }
    RatFn& operator+=(const RatFn& b) { return *this = *this + b; }
    RatFn& operator-=(const RatFn& b) { return *this = *this - b; }
    RatFn& operator*=(const RatFn& b) { return *this = *this * b; }
    RatFn& operator/=(const RatFn& b) { return *this = *this / b; }

    friend bool operator==(const RatFn& a, const RatFn& b) {
        return a.num_ == b.num_ && a.den_ == b.den_;  // canonical forms
    }
    friend bool operator!=(const RatFn& a, const RatFn& b) { return !(a == b); }

    std::string str(const std::string& var = "z") const {
        if (den_.is_one()) return num_.str(var);
        return "(" + num_.str(var) + ")/(" + den_.str(var) + ")";
    }

   private:
    struct no_reduce_tag {};
    RatFn(Poly<F> num, Poly<F> den, no_reduce_tag) : num_(std::move(num)), den_(std::move(den)) {}

    void reduce() {
        if (den_.is_zero()) throw Error("zero denominator");
        if (num_.is_zero()) {
            den_ = Poly<F>{FieldOps<F>::from_int(1)};
            return;
        }
        Poly<F> g = gcd(num_, den_);
        if (!g.is_one()) {
            num_ = num_ / g;
            den_ = den_ / g;
        }
        const F lead = den_.lead();
        if (!(lead == F(FieldOps<F>::from_int(1)))) {
            num_ = num_ * (F(FieldOps<F>::from_int(1)) / lead);
            den_ = den_.monic();
        }
    }

    Poly<F> num_;
    Poly<F> den_;
};

}  // namespace ltiflow
