#pragma once

#include <algorithm>
#include <optional>
#include <vector>

#include "ltiflow/poly.hpp"

namespace ltiflow {

struct UnitDiskCount {
    std::size_t inside = 0;
    std::size_t on_circle = 0;
    std::size_t outside = 0;
    bool boundary() const { return on_circle > 0; }
};

namespace detail {

/// Schur transform conj(a0) p - a_n p~ where p~ is the conjugate-reversed
/// polynomial. Kills the z^n term; constant term is |a0|^2 - |a_n|^2.
template <class F>
Poly<F> schur_transform(const Poly<F>& p) {
    const F a0 = p.constant_term();
    const F an = p.lead();
    return FieldOps<F>::conj(a0) * p - an * p.reverse_conj();
}

template <class F>
UnitDiskCount unit_disk_count_impl(const Poly<F>& p, int depth);

/// Self-inversive case (conj(a0) p = a_n p~): roots are closed under the
/// reflection r -> 1/conj(r). Cohn reduction: the boundary count is
/// deg p - 2 * (zeros of p' outside the closed unit disk), and the interior
/// and exterior counts are equal.
template <class F>
UnitDiskCount count_self_inversive(const Poly<F>& p, int depth) {
    const std::size_t n = static_cast<std::size_t>(p.deg());
    UnitDiskCount d = unit_disk_count_impl(p.derivative(), depth + 1);
    UnitDiskCount r;
    r.on_circle = n - 2 * d.outside;
    r.inside = r.outside = d.outside;
    return r;
}

/// Singular case with no boundary roots: |a0| = |a_n| yet p is not
/// self-inversive and gcd(p, p~) = 1. Resolved by counting the roots of
/// p(rho z) for exact rational radii rho shrinking to 1 from both sides;
/// the counts agree once no root modulus lies between them.
template <class F>
UnitDiskCount count_by_scaling(const Poly<F>& p, int depth) {
    const std::size_t n = static_cast<std::size_t>(p.deg());
    Rat half(1, 2);
    Rat eps(1, 2);
    for (int k = 0; k < 64; ++k, eps *= half) {
        F lo = F(Rat(1) - eps);
        F hi = F(Rat(1) + eps);
        UnitDiskCount clo = unit_disk_count_impl(p.scale_arg(lo), depth + 1);
        if (clo.on_circle) continue;  // a root modulus hit 1 - eps exactly
        UnitDiskCount chi = unit_disk_count_impl(p.scale_arg(hi), depth + 1);
        if (chi.on_circle) continue;
        if (clo.inside == chi.inside) {
            UnitDiskCount r;
            r.inside = clo.inside;
            r.outside = n - r.inside;
            return r;
        }
    }
    throw Error("unit-disk root count did not resolve a singular case");
}

template <class F>
UnitDiskCount unit_disk_count_impl(const Poly<F>& p0, int depth) {
    if (depth > 512) throw Error("unit-disk root count recursion limit");
    UnitDiskCount r;
    if (p0.is_zero()) throw Error("unit-disk root count of the zero polynomial");
    std::size_t s = p0.order_at_zero();
    r.inside += s;
    Poly<F> p = p0.shift_down(s);
    if (p.deg() <= 0) return r;
    const std::size_t n = static_cast<std::size_t>(p.deg());

    Poly<F> q = schur_transform(p);
    if (q.is_zero()) {
        UnitDiskCount si = count_self_inversive(p, depth);
        r.inside += si.inside;
        r.on_circle += si.on_circle;
        r.outside += si.outside;
        return r;
    }
    Rat gamma = FieldOps<F>::abs2(p.constant_term()) - FieldOps<F>::abs2(p.lead());
    if (gamma == 0) {
        Poly<F> g = gcd(p, p.reverse_conj());
        UnitDiskCount part;
        if (g.deg() > 0) {
            // g carries all boundary roots (and reflection-symmetric pairs)
            UnitDiskCount cg = unit_disk_count_impl(g, depth + 1);
            UnitDiskCount ch = unit_disk_count_impl(p / g, depth + 1);
            part.inside = cg.inside + ch.inside;
            part.on_circle = cg.on_circle + ch.on_circle;
            part.outside = cg.outside + ch.outside;
        } else {
            part = count_by_scaling(p, depth);
        }
        r.inside += part.inside;
        r.on_circle += part.on_circle;
        r.outside += part.outside;
        return r;
    }

    UnitDiskCount cq = unit_disk_count_impl(q, depth + 1);
    // gamma > 0: q keeps the interior count; gamma < 0: q counts the exterior.
    std::size_t on = cq.on_circle;
    std::size_t in = (gamma > 0) ? cq.inside : n - on - cq.inside;
    r.inside += in;
    r.on_circle += on;
    r.outside += n - in - on;
    return r;
}

}  // namespace detail

/// Exact count of roots with |z| < 1, |z| = 1 and |z| > 1, with multiplicity.
/// Works over Q and Q(i); all comparisons are on exact squared moduli.
template <class F>
UnitDiskCount roots_in_unit_disk(const Poly<F>& p) {
    return detail::unit_disk_count_impl(p, 0);
}

/// True when every root is strictly inside the unit circle.
template <class F>
bool strictly_stable(const Poly<F>& p) {
    if (p.is_zero()) return false;
    if (p.deg() == 0) return true;
    UnitDiskCount c = roots_in_unit_disk(p);
    return c.inside == static_cast<std::size_t>(p.deg());
}

namespace detail {

inline std::vector<BigInt> small_divisors(BigInt n, std::size_t cap = 4096) {
    // positive divisors found by trial division; gives up past the cap and
    // then at least returns what it has plus |n| itself
    if (n < 0) n = -n;
    std::vector<BigInt> divs;
    if (n == 0) return divs;
    std::vector<std::pair<BigInt, unsigned>> fac;
    BigInt m = n;
    for (BigInt d = 2; d * d <= m && d < 1000000; ++d) {
        if (m % d == 0) {
            unsigned e = 0;
            while (m % d == 0) {
                m /= d;
                ++e;
            }
            fac.emplace_back(d, e);
        }
    }
    if (m > 1) fac.emplace_back(m, 1);
    divs.push_back(1);
    for (const auto& [pr, e] : fac) {
        std::size_t sz = divs.size();
        BigInt pw = 1;
        for (unsigned k = 1; k <= e; ++k) {
            pw *= pr;
            for (std::size_t i = 0; i < sz; ++i) {
                divs.push_back(divs[i] * pw);
                if (divs.size() > cap) return divs;
            }
        }
    }
    std::sort(divs.begin(), divs.end());
    divs.erase(std::unique(divs.begin(), divs.end()), divs.end());
    return divs;
}

template <class F>
std::vector<F> rational_root_candidates(const Poly<F>& p);

template <>
inline std::vector<Rat> rational_root_candidates(const Poly<Rat>& p) {
    // clear denominators to an integer polynomial; roots are p/q with
    // p | constant term, q | leading coefficient
    BigInt scale = 1;
    for (const auto& c : p.coeffs()) scale = lcm(scale, denominator(c));
    std::vector<BigInt> ic;
    for (const auto& c : p.coeffs()) ic.push_back(numerator(c * Rat(scale)));
    std::size_t lo = 0;
    while (lo < ic.size() && ic[lo] == 0) ++lo;
    if (lo >= ic.size()) return {};
    auto ps = small_divisors(ic[lo]);
    auto qs = small_divisors(ic.back());
    std::vector<Rat> cands;
    for (const auto& a : ps)
        for (const auto& b : qs) {
            cands.emplace_back(a, b);
            cands.emplace_back(-a, b);
        }
    return cands;
}

template <>
inline std::vector<GaussRat> rational_root_candidates(const Poly<GaussRat>& p) {
    // no divisor search over Z[i]; real rational candidates still apply
    Poly<Rat> re_part;
    {
        std::vector<Rat> c;
        bool all_real = true;
        for (const auto& x : p.coeffs()) {
            if (x.im != 0) all_real = false;
            c.push_back(x.re);
        }
        if (!all_real) return {};
        re_part = Poly<Rat>(std::move(c));
    }
    std::vector<GaussRat> cands;
    for (const auto& r : rational_root_candidates(re_part)) cands.emplace_back(r);
    return cands;
}

}  // namespace detail

/// Roots of a monic quadratic z^2 + b z + c that lie in the working field.
template <class F>
std::optional<std::pair<F, F>> quadratic_roots(const F& b, const F& c) {
    F disc = b * b - F(FieldOps<F>::from_int(4)) * c;
    auto s = sqrt_exact(disc);
    if (!s) return std::nullopt;
    F two = FieldOps<F>::from_int(2);
    return std::make_pair(F((-b + *s) / two), F((-b - *s) / two));
}

struct FactorOutcome {
    bool complete = false;  // every root was extracted
};

/// Extracts as many roots of p inside the working field as possible, trying
/// the supplied hints, rational-root candidates and (for quadratic
/// remainders) the exact quadratic formula. Returns the roots with
/// multiplicity; `remainder` holds the unfactored part.
template <class F>
std::vector<F> field_roots(const Poly<F>& p0, const std::vector<F>& hints, Poly<F>* remainder) {
    Poly<F> p = p0.monic();
    std::vector<F> roots;
    std::size_t s = p.order_at_zero();
    for (std::size_t i = 0; i < s; ++i) roots.push_back(FieldOps<F>::from_int(0));
    p = p.shift_down(s);

    auto deflate_all = [&](const F& r) {
        Poly<F> lin{-r, FieldOps<F>::from_int(1)};
        while (p.deg() >= 1) {
            auto [q, rem] = divmod(p, lin);
            if (!rem.is_zero()) break;
            roots.push_back(r);
            p = q;
        }
    };

    for (const auto& h : hints)
        if (p.deg() >= 1 && FieldOps<F>::is_zero(p.eval(h))) deflate_all(h);
    if (p.deg() >= 1) {
        for (const auto& cand : detail::rational_root_candidates(p)) {
            if (p.deg() < 1) break;
            if (FieldOps<F>::is_zero(p.eval(cand))) deflate_all(cand);
        }
    }
    if (p.deg() == 2) {
        F qb = p[1] / p[2];
        F qc = p[0] / p[2];
        if (auto qr = quadratic_roots(qb, qc)) {
            roots.push_back(qr->first);
            roots.push_back(qr->second);
            p = Poly<F>{FieldOps<F>::from_int(1)};
        }
    }
    if (p.deg() == 1) {
        roots.push_back(-p[0] / p[1]);
        p = Poly<F>{FieldOps<F>::from_int(1)};
    }
    if (remainder) *remainder = p;
    return roots;
}

}  // namespace ltiflow
