#pragma once

#include <cstdlib>
#include <utility>
#include <vector>

#include "ltiflow/matrix.hpp"
#include "ltiflow/poly.hpp"
#include "ltiflow/ratfn.hpp"

namespace ltiflow {

template <class F>
using RatMatrix = Matrix<RatFn<F>>;

namespace detail {

/// Fraction-free (Bareiss) elimination to row echelon form over an exact ring
/// with exact division. Pivots are the first nonzero entry in column order,
/// ties broken by lowest row index. Returns (rank, det-of-leading-square-part).
/// `det_out` is meaningful only when the matrix is square and has full rank.
template <class Ring>
std::pair<std::size_t, Ring> bareiss_echelon(Matrix<Ring> m) {
    const std::size_t nr = m.rows(), nc = m.cols();
    Ring prev = Ring(1);
    int sign = 1;
    std::size_t r = 0;
    for (std::size_t c = 0; c < nc && r < nr; ++c) {
        std::size_t p = r;
        while (p < nr && m(p, c) == Ring(0)) ++p;
        if (p == nr) continue;
        if (p != r) {
            for (std::size_t j = c; j < nc; ++j) std::swap(m(p, j), m(r, j));
            sign = -sign;
        }
        for (std::size_t i = r + 1; i < nr; ++i) {
            for (std::size_t j = c + 1; j < nc; ++j)
                m(i, j) = (m(r, c) * m(i, j) - m(i, c) * m(r, j)) / prev;
            m(i, c) = Ring(0);
        }
        prev = m(r, c);
        ++r;
    }
    Ring det = (sign < 0) ? -prev : prev;
    return {r, det};
}

/// Clears denominators row by row; rank is invariant under row scaling.
template <class F>
Matrix<Poly<F>> to_poly_rows(const RatMatrix<F>& m, std::vector<Poly<F>>* row_scales = nullptr) {
    Matrix<Poly<F>> p(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Poly<F> l{FieldOps<F>::from_int(1)};
        for (std::size_t j = 0; j < m.cols(); ++j) l = lcm(l, m(i, j).den());
        for (std::size_t j = 0; j < m.cols(); ++j)
            p(i, j) = m(i, j).num() * (l / m(i, j).den());
        if (row_scales) row_scales->push_back(l);
    }
    return p;
}

}  // namespace detail

/// Exact rank over the rational-function field.
template <class F>
std::size_t mat_rank(const RatMatrix<F>& m) {
    if (m.empty()) return 0;
    return detail::bareiss_echelon(detail::to_poly_rows(m)).first;
}

template <class F>
std::size_t mat_rank_const(const Matrix<F>& m) {
    if (m.empty()) return 0;
    return detail::bareiss_echelon(m).first;
}

/// Exact determinant of a square rational-function matrix.
template <class F>
RatFn<F> mat_det(const RatMatrix<F>& m) {
    if (!m.is_square()) throw DimensionMismatch("determinant of non-square matrix");
    if (m.empty()) return RatFn<F>(1);
    std::vector<Poly<F>> scales;
    auto p = detail::to_poly_rows(m, &scales);
    auto [rank, det] = detail::bareiss_echelon(std::move(p));
    if (rank < m.rows()) return RatFn<F>(0);
    Poly<F> denom{FieldOps<F>::from_int(1)};
    for (const auto& s : scales) denom *= s;
    return RatFn<F>(det, denom);
}

/// Gauss-Jordan inverse over the rational-function field. Throws SingularMatrix.
template <class F>
RatMatrix<F> mat_inverse(const RatMatrix<F>& m) {
    if (!m.is_square()) throw DimensionMismatch("inverse of non-square matrix");
    const std::size_t n = m.rows();
    RatMatrix<F> a = m, inv = RatMatrix<F>::identity(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a(p, c).is_zero()) ++p;
        if (p == n) throw SingularMatrix();
        if (p != c)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(p, j), a(c, j));
                std::swap(inv(p, j), inv(c, j));
            }
        RatFn<F> piv = a(c, c);
        for (std::size_t j = 0; j < n; ++j) {
            a(c, j) /= piv;
            inv(c, j) /= piv;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == c || a(i, c).is_zero()) continue;
            RatFn<F> f = a(i, c);
            for (std::size_t j = 0; j < n; ++j) {
                a(i, j) -= f * a(c, j);
                inv(i, j) -= f * inv(c, j);
            }
        }
    }
    return inv;
}

/// Solves M X = B exactly. Throws SingularMatrix when M is singular.
template <class F>
RatMatrix<F> mat_solve(const RatMatrix<F>& m, const RatMatrix<F>& b) {
    if (!m.is_square() || m.rows() != b.rows())
        throw DimensionMismatch("solve shape mismatch");
    return mat_inverse(m) * b;
}

/// rank D + rank(A - B D^{-1} C); equals the rank of [A B; C D] when D is
/// invertible. Throws SingularD otherwise.
template <class F>
std::size_t schur_rank(const RatMatrix<F>& a, const RatMatrix<F>& b, const RatMatrix<F>& c,
                       const RatMatrix<F>& d) {
    if (!d.is_square()) throw SingularD("D block is not square");
    if (a.rows() != b.rows() || a.cols() != c.cols() || b.cols() != d.cols() ||
        c.rows() != d.rows())
        throw DimensionMismatch("schur_rank block shapes");
    if (d.empty()) return mat_rank(a);
    RatMatrix<F> dinv;
    try {
        dinv = mat_inverse(d);
    } catch (const SingularMatrix&) {
        throw SingularD();
    }
    return d.rows() + mat_rank(RatMatrix<F>(a - b * (dinv * c)));
}

/// Monic characteristic polynomial det(zI - M) of a constant square matrix.
template <class F>
Poly<F> char_poly_const(const Matrix<F>& m) {
    if (!m.is_square()) throw DimensionMismatch("characteristic polynomial of non-square matrix");
    const std::size_t n = m.rows();
    Matrix<Poly<F>> zi(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            zi(i, j) = Poly<F>(-m(i, j));
            if (i == j) zi(i, j) += Poly<F>::z();
        }
    auto [rank, det] = detail::bareiss_echelon(std::move(zi));
    (void)rank;  // zI - M is always full rank over F[z]
    return det;
}

template <class F>
Poly<F> char_poly(const RatMatrix<F>& m) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (!m(i, j).is_constant())
                throw NonConstantEntries("char_poly requires constant entries");
    return char_poly_const(m.template map<F>([](const RatFn<F>& e) { return e.constant_value(); }));
}

/// Entrywise evaluation at z = z0. Throws PoleAtPoint when some denominator
/// vanishes there.
template <class F>
Matrix<F> eval_matrix(const RatMatrix<F>& m, const F& z0) {
    Matrix<F> r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (m(i, j).has_pole_at(z0)) throw PoleAtPoint(i, j);
            r(i, j) = m(i, j).eval(z0);
        }
    return r;
}

template <class F>
RatMatrix<F> to_ratfn_matrix(const Matrix<F>& m) {
    return m.template map<RatFn<F>>([](const F& e) { return RatFn<F>(e); });
}

template <class F>
Matrix<F> to_const_matrix(const RatMatrix<F>& m) {
    return m.template map<F>([](const RatFn<F>& e) { return e.constant_value(); });
}

}  // namespace ltiflow
