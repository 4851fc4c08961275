#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <optional>
#include <ostream>
#include <string>

#include "ltiflow/errors.hpp"

namespace ltiflow {

/// Exact rational scalar over the rationals.
using Rat = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

/// Gaussian rational a + b i with a, b exact rationals.
struct GaussRat {
    Rat re{0};
    Rat im{0};

    GaussRat() = default;
    GaussRat(int v) : re(v) {}  // NOLINT(google-explicit-constructor)
    GaussRat(long v) : re(v) {}  // NOLINT(google-explicit-constructor)
    GaussRat(Rat r) : re(std::move(r)) {}  // NOLINT(google-explicit-constructor)
    GaussRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

    bool is_zero() const { return re == 0 && im == 0; }

    friend GaussRat operator+(const GaussRat& a, const GaussRat& b) {
        return {a.re + b.re, a.im + b.im};
    }
    friend GaussRat operator-(const GaussRat& a, const GaussRat& b) {
        return {a.re - b.re, a.im - b.im};
    }
    friend GaussRat operator-(const GaussRat& a) { return {-a.re, -a.im}; }
    friend GaussRat operator*(const GaussRat& a, const GaussRat& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend GaussRat operator/(const GaussRat& a, const GaussRat& b) {
        Rat n = b.re * b.re + b.im * b.im;
        if (n == 0) throw Error("division by zero Gaussian rational");
        return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
    }
    GaussRat& operator+=(const GaussRat& b) { return *this = *this + b; }
    GaussRat& operator-=(const GaussRat& b) { return *this = *this - b; }
    GaussRat& operator*=(const GaussRat& b) { return *this = *this * b; }
    GaussRat& operator/=(const GaussRat& b) { return *this = *this / b; }
    friend bool operator==(const GaussRat& a, const GaussRat& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const GaussRat& a, const GaussRat& b) { return !(a == b); }
};

/// Field operations shared by Rat and GaussRat.
template <class F>
struct FieldOps;

template <>
struct FieldOps<Rat> {
    static constexpr bool is_real = true;
    static const char* name() { return "Q"; }
    static Rat conj(const Rat& x) { return x; }
    static Rat abs2(const Rat& x) { return x * x; }  // squared modulus, in Q
    static bool is_zero(const Rat& x) { return x == 0; }
    static Rat from_int(long v) { return Rat(v); }
    static Rat real_part(const Rat& x) { return x; }
};

template <>
struct FieldOps<GaussRat> {
    static constexpr bool is_real = false;
    static const char* name() { return "Qi"; }
    static GaussRat conj(const GaussRat& x) { return {x.re, -x.im}; }
    static Rat abs2(const GaussRat& x) { return x.re * x.re + x.im * x.im; }
    static bool is_zero(const GaussRat& x) { return x.is_zero(); }
    static GaussRat from_int(long v) { return GaussRat(v); }
    static Rat real_part(const GaussRat& x) { return x.re; }
};

inline bool is_zero(const Rat& x) { return x == 0; }
inline bool is_zero(const GaussRat& x) { return x.is_zero(); }

/// Exact square root of a nonnegative rational, if it is a perfect square.
inline std::optional<Rat> sqrt_exact(const Rat& x) {
    if (x < 0) return std::nullopt;
    BigInt n = numerator(x), d = denominator(x);
    BigInt sn = sqrt(n), sd = sqrt(d);
    if (sn * sn != n || sd * sd != d) return std::nullopt;
    return Rat(sn, sd);
}

/// Exact square root of a Gaussian rational within Q(i), if it exists.
inline std::optional<GaussRat> sqrt_exact(const GaussRat& z) {
    if (z.im == 0) {
        if (auto s = sqrt_exact(z.re)) return GaussRat(*s);
        if (auto s = sqrt_exact(Rat(-z.re))) return GaussRat(Rat(0), *s);
        return std::nullopt;
    }
    // (x+yi)^2 = a+bi  =>  x^2 = (a + |z|)/2, y = b/(2x)
    auto mod = sqrt_exact(FieldOps<GaussRat>::abs2(z));
    if (!mod) return std::nullopt;
    auto x = sqrt_exact(Rat((z.re + *mod) / 2));
    if (!x || *x == 0) return std::nullopt;
    Rat y = z.im / (2 * *x);
    GaussRat r(*x, y);
    if (r * r != z) return std::nullopt;
    return r;
}

namespace detail {

inline std::string rat_to_string(const Rat& x) {
    std::string s = numerator(x).str();
    if (denominator(x) != 1) s += "/" + denominator(x).str();
    return s;
}

}  // namespace detail

inline std::string to_string(const Rat& x) { return detail::rat_to_string(x); }

/// "a/b+c/di" with zero parts omitted; "0" for zero.
inline std::string to_string(const GaussRat& z) {
    if (z.is_zero()) return "0";
    std::string s;
    if (z.re != 0) s = detail::rat_to_string(z.re);
    if (z.im != 0) {
        std::string im = detail::rat_to_string(z.im);
        if (!s.empty() && im[0] != '-') s += "+";
        if (im == "1")
            s += "i";
        else if (im == "-1")
            s += "-i";
        else
            s += im + "i";
    }
    return s;
}

inline std::ostream& operator<<(std::ostream& os, const GaussRat& z) {
    return os << to_string(z);
}

namespace detail {

// Splits "a+b", "a-b", "-a+b", ... at the top-level sign; returns npos if none.
inline std::size_t split_sign_pos(const std::string& s) {
    for (std::size_t i = 1; i < s.size(); ++i) {
        if ((s[i] == '+' || s[i] == '-') && s[i - 1] != '/' && s[i - 1] != '+' && s[i - 1] != '-')
            return i;
    }
    return std::string::npos;
}

inline Rat parse_rat(std::string s) {
    if (!s.empty() && s[0] == '+') s.erase(0, 1);
    if (s.empty()) throw ParseError("empty rational literal");
    try {
        auto slash = s.find('/');
        if (slash == std::string::npos) return Rat(BigInt(s));
        return Rat(BigInt(s.substr(0, slash)), BigInt(s.substr(slash + 1)));
    } catch (const std::exception&) {
        throw ParseError("bad rational literal: " + s);
    }
}

}  // namespace detail

template <class F>
F scalar_from_string(const std::string& s);

template <>
inline Rat scalar_from_string<Rat>(const std::string& s) {
    if (!s.empty() && s.back() == 'i') throw ParseError("imaginary literal in field Q: " + s);
    return detail::parse_rat(s);
}

template <>
inline GaussRat scalar_from_string<GaussRat>(const std::string& s) {
    if (s.empty()) throw ParseError("empty scalar literal");
    auto parse_term = [](const std::string& t) -> GaussRat {
        if (t.empty()) throw ParseError("empty term in scalar literal");
        if (t.back() == 'i') {
            std::string body = t.substr(0, t.size() - 1);
            if (body.empty() || body == "+") return GaussRat(Rat(0), Rat(1));
            if (body == "-") return GaussRat(Rat(0), Rat(-1));
            return GaussRat(Rat(0), detail::parse_rat(body));
        }
        return GaussRat(detail::parse_rat(t));
    };
    auto pos = detail::split_sign_pos(s);
    if (pos == std::string::npos) return parse_term(s);
    GaussRat a = parse_term(s.substr(0, pos));
    GaussRat b = parse_term(s.substr(pos));  // keeps the sign
    return a + b;
}

}  // namespace ltiflow
