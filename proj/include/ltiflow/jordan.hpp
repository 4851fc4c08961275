#pragma once

#include <vector>

#include "ltiflow/linalg.hpp"

namespace ltiflow {

/// Structural Jordan-form check: off-diagonal entries vanish except for a
/// 0/1 superdiagonal, and a superdiagonal 1 only joins equal diagonal
/// entries.
template <class F>
bool is_jordan_form(const Matrix<F>& a) {
    if (!a.is_square()) return false;
    const std::size_t m = a.rows();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            if (i == j) continue;
            if (j == i + 1) {
                const F& s = a(i, j);
                if (FieldOps<F>::is_zero(s)) continue;
                if (!(s == F(FieldOps<F>::from_int(1)))) return false;
                if (!(a(i, i) == a(j, j))) return false;
            } else if (!FieldOps<F>::is_zero(a(i, j))) {
                return false;
            }
        }
    return true;
}

/// Jordan block bookkeeping for one eigenvalue: the kappa sequences count
/// blocks (from the bottom-right and top-left corners respectively), the iota
/// sequences locate those corner rows/columns, and the permutations collect
/// the corresponding all-zero rows and columns of lambda I - A at the top
/// left.
template <class F>
struct JordanIndexing {
    F lambda;
    std::size_t m_lambda = 0;
    std::vector<std::size_t> kappa_l, kappa_r;  // indices 0..m
    std::vector<std::size_t> iota_l, iota_r;    // indices 0..m_lambda
    std::vector<std::size_t> pi_l, pi_r;        // 1-based images of 1..m
    Matrix<F> p_l, p_r;
    Matrix<F> b_lambda, c_lambda;  // corner selectors: m x m_lambda and m_lambda x m
};

template <class F>
JordanIndexing<F> jordan_indexing(const Matrix<F>& a, const F& lambda) {
    if (!is_jordan_form(a)) throw NotJordanForm("matrix is not in Jordan normal form");
    const std::size_t m = a.rows();
    auto at = [&](std::size_t i, std::size_t j) -> const F& { return a(i - 1, j - 1); };
    auto is_lambda = [&](std::size_t i) { return at(i, i) == lambda; };
    auto super_zero = [&](std::size_t i, std::size_t j) {
        return FieldOps<F>::is_zero(at(i, j));
    };

    JordanIndexing<F> x;
    x.lambda = lambda;
    x.kappa_l.assign(m + 1, 0);
    x.kappa_r.assign(m + 1, 0);
    for (std::size_t i = 1; i < m; ++i)
        x.kappa_l[i] = x.kappa_l[i - 1] + ((is_lambda(i) && super_zero(i, i + 1)) ? 1 : 0);
    if (m >= 1) x.kappa_l[m] = x.kappa_l[m - 1] + (is_lambda(m) ? 1 : 0);
    if (m >= 1) x.kappa_r[1] = is_lambda(1) ? 1 : 0;
    for (std::size_t i = 2; i <= m; ++i)
        x.kappa_r[i] = x.kappa_r[i - 1] + ((is_lambda(i) && super_zero(i - 1, i)) ? 1 : 0);
    x.m_lambda = x.kappa_l[m];

    auto iota_from = [&](const std::vector<std::size_t>& kappa) {
        std::vector<std::size_t> iota{0};
        for (std::size_t i = 1; i <= x.m_lambda; ++i) {
            std::size_t k = iota.back() + 1;
            while (k <= m && kappa[k] == kappa[k - 1]) ++k;
            iota.push_back(k);
        }
        return iota;
    };
    x.iota_l = iota_from(x.kappa_l);
    x.iota_r = iota_from(x.kappa_r);

    auto pi_from = [&](const std::vector<std::size_t>& kappa) {
        std::vector<std::size_t> pi(m);
        for (std::size_t i = 1; i <= m; ++i)
            pi[i - 1] = (kappa[i] > kappa[i - 1]) ? kappa[i] : i + kappa[m] - kappa[i];
        return pi;
    };
    x.pi_l = pi_from(x.kappa_l);
    x.pi_r = pi_from(x.kappa_r);

    auto perm_matrix = [&](const std::vector<std::size_t>& pi) {
        Matrix<F> p(m, m);
        for (std::size_t i = 0; i < m; ++i) p(i, pi[i] - 1) = FieldOps<F>::from_int(1);
        return p;
    };
    x.p_l = perm_matrix(x.pi_l);
    x.p_r = perm_matrix(x.pi_r);

    x.b_lambda = Matrix<F>(m, x.m_lambda);
    x.c_lambda = Matrix<F>(x.m_lambda, m);
    for (std::size_t j = 1; j <= x.m_lambda; ++j) {
        x.b_lambda(x.iota_l[j] - 1, j - 1) = FieldOps<F>::from_int(1);
        x.c_lambda(j - 1, x.iota_r[j] - 1) = FieldOps<F>::from_int(1);
    }
    return x;
}

/// Blocks of P_L^T (zI - A) P_R together with the permuted controller
/// matrices. A_{1,1} is m_lambda x m_lambda and vanishes at z = lambda, as do
/// the off blocks; A_{2,2}(lambda) is invertible.
template <class F>
struct PartitionedSystem {
    JordanIndexing<F> indexing;
    RatMatrix<F> a11, a12, a21, a22;              // entries linear in z
    std::vector<Matrix<F>> b1, b2, c1, c2;        // per controller
};

template <class F>
PartitionedSystem<F> partition_jordan(const Matrix<F>& a, const F& lambda,
                                      const std::vector<Matrix<F>>& b_list,
                                      const std::vector<Matrix<F>>& c_list) {
    auto idx = jordan_indexing(a, lambda);
    const std::size_t m = a.rows();
    const std::size_t ml = idx.m_lambda;

    RatMatrix<F> zia(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            zia(i, j) = RatFn<F>(Poly<F>(-a(i, j)));
            if (i == j) zia(i, j) += RatFn<F>::z();
        }
    auto plt = to_ratfn_matrix(idx.p_l.transpose());
    auto pr = to_ratfn_matrix(idx.p_r);
    RatMatrix<F> perm = plt * zia * pr;

    PartitionedSystem<F> part;
    part.indexing = idx;
    part.a11 = perm.block(0, 0, ml, ml);
    part.a12 = perm.block(0, ml, ml, m - ml);
    part.a21 = perm.block(ml, 0, m - ml, ml);
    part.a22 = perm.block(ml, ml, m - ml, m - ml);

    // sanity asserts from the construction
    auto a11_l = eval_matrix(part.a11, lambda);
    auto a12_l = eval_matrix(part.a12, lambda);
    auto a21_l = eval_matrix(part.a21, lambda);
    if (!a11_l.is_zero() || !a12_l.is_zero() || !a21_l.is_zero())
        throw NotJordanForm("permuted blocks do not vanish at lambda");
    if (mat_rank_const(eval_matrix(part.a22, lambda)) != m - ml)
        throw NotJordanForm("trailing block is singular at lambda");

    for (std::size_t i = 0; i < b_list.size(); ++i) {
        Matrix<F> pb = idx.p_l.transpose() * b_list[i];
        Matrix<F> cp = c_list[i] * idx.p_r;
        part.b1.push_back(pb.block(0, 0, ml, pb.cols()));
        part.b2.push_back(pb.block(ml, 0, m - ml, pb.cols()));
        part.c1.push_back(cp.block(0, 0, cp.rows(), ml));
        part.c2.push_back(cp.block(0, ml, cp.rows(), m - ml));
    }
    return part;
}

}  // namespace ltiflow
