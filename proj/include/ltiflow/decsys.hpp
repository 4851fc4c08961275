#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ltiflow/jordan.hpp"
#include "ltiflow/roots.hpp"
#include "ltiflow/standard.hpp"

namespace ltiflow {

namespace detail {

template <class F>
F det_const(const Matrix<F>& m) {
    if (!m.is_square()) throw DimensionMismatch("determinant of non-square matrix");
    if (m.empty()) return FieldOps<F>::from_int(1);
    auto [rank, det] = bareiss_echelon(m);
    if (rank < m.rows()) return FieldOps<F>::from_int(0);
    return det;
}

}  // namespace detail

/// Decentralized plant x[n+1] = A x + sum B_i u_i, y_i = C_i x (+ sum D_ij u_j
/// when proper).
template <class F>
struct DecSystem {
    Matrix<F> a;
    std::vector<Matrix<F>> b;  // m x q_i
    std::vector<Matrix<F>> c;  // r_i x m
    std::optional<std::vector<std::vector<Matrix<F>>>> d;  // complete v x v grid, D[i][j]: r_i x q_j

    std::size_t dim() const { return a.rows(); }
    std::size_t controller_count() const { return b.size(); }
    bool proper() const { return d.has_value(); }
};

template <class F>
void validate(const DecSystem<F>& sys) {
    if (!sys.a.is_square()) throw DimensionMismatch("plant matrix must be square");
    if (sys.b.size() != sys.c.size())
        throw DimensionMismatch("controller input/output matrix counts differ");
    const std::size_t m = sys.dim();
    for (std::size_t i = 0; i < sys.b.size(); ++i) {
        if (sys.b[i].rows() != m)
            throw DimensionMismatch("B_" + std::to_string(i + 1) + " row count");
        if (sys.c[i].cols() != m)
            throw DimensionMismatch("C_" + std::to_string(i + 1) + " column count");
    }
    if (sys.d) {
        const auto& d = *sys.d;
        if (d.size() != sys.b.size()) throw DimensionMismatch("feedthrough grid is incomplete");
        for (std::size_t i = 0; i < d.size(); ++i) {
            if (d[i].size() != sys.b.size())
                throw DimensionMismatch("feedthrough grid is incomplete");
            for (std::size_t j = 0; j < d[i].size(); ++j)
                if (d[i][j].rows() != sys.c[i].rows() || d[i][j].cols() != sys.b[j].cols())
                    throw DimensionMismatch("D_" + std::to_string(i + 1) + "," +
                                            std::to_string(j + 1) + " shape");
        }
    }
}

inline constexpr std::size_t kControllerEnumerationCap = 20;

/// Geometric multiplicity of lambda, the number of Jordan blocks attached to
/// it; zero when lambda is not an eigenvalue.
template <class F>
std::size_t m_lambda_of(const Matrix<F>& a, const F& lambda) {
    const std::size_t m = a.rows();
    Matrix<F> shifted = a;
    for (std::size_t i = 0; i < m; ++i) shifted(i, i) -= lambda;
    return m - mat_rank_const(shifted);
}

struct FixedModeVerdict {
    bool fixed = false;
    std::size_t min_rank = 0;
    std::vector<std::size_t> witness;  // controller subset V attaining the minimum
};

/// Algebraic fixed-mode test: the minimum over all controller subsets V of
/// rank [lambda I - A, -B_V; C_{V^c}, D_{V^c,V}] falls below dim A exactly
/// when lambda is a fixed mode.
template <class F>
FixedModeVerdict fixed_mode_algebraic(const DecSystem<F>& sys, const F& lambda) {
    validate(sys);
    const std::size_t v = sys.controller_count();
    if (v > kControllerEnumerationCap)
        throw TooManyControllers("subset enumeration capped at " +
                                 std::to_string(kControllerEnumerationCap) + " controllers");
    const std::size_t m = sys.dim();
    Matrix<F> lia = -sys.a;
    for (std::size_t i = 0; i < m; ++i) lia(i, i) += lambda;

    FixedModeVerdict verdict;
    bool first = true;
    for (std::size_t mask = 0; mask < (std::size_t(1) << v); ++mask) {
        std::vector<std::size_t> in, out;
        for (std::size_t i = 0; i < v; ++i)
            (mask & (std::size_t(1) << i)) ? in.push_back(i) : out.push_back(i);
        Matrix<F> top = lia;
        for (std::size_t j : in) top = Matrix<F>::hstack(top, -sys.b[j]);
        Matrix<F> block = top;
        for (std::size_t i : out) {
            Matrix<F> row = sys.c[i];
            for (std::size_t j : in) {
                Matrix<F> dij = sys.d ? (*sys.d)[i][j]
                                      : Matrix<F>::zero(sys.c[i].rows(), sys.b[j].cols());
                row = Matrix<F>::hstack(row, dij);
            }
            block = Matrix<F>::vstack(block, row);
        }
        std::size_t r = mat_rank_const(block);
        if (first || r < verdict.min_rank) {
            verdict.min_rank = r;
            verdict.witness = in;
            first = false;
        }
    }
    verdict.fixed = verdict.min_rank < m;
    return verdict;
}

/// Sampling fixed-mode test: lambda is reported fixed when
/// det(lambda I - A - sum B_i K_i C_i) vanishes for every sampled constant
/// gain tuple (proper systems close the loop through (I - DK)^{-1} first).
/// One nonzero determinant proves "not fixed" outright.
template <class F>
bool fixed_mode_sampling(const DecSystem<F>& sys, const F& lambda, const RankConfig& cfg) {
    validate(sys);
    const std::size_t m = sys.dim();
    const std::size_t v = sys.controller_count();
    Sampler rng(cfg.seed);
    unsigned rounds = cfg.rounds > 0 ? cfg.rounds : 5;
    for (unsigned round = 0; round < rounds; ++round) {
        for (int attempt = 0;; ++attempt) {
            std::vector<Matrix<F>> k;
            for (std::size_t i = 0; i < v; ++i) {
                Matrix<F> ki(sys.b[i].cols(), sys.c[i].rows());
                for (std::size_t p = 0; p < ki.rows(); ++p)
                    for (std::size_t q = 0; q < ki.cols(); ++q)
                        ki(p, q) = rng.template scalar<F>(cfg.sample_bound);
                k.push_back(std::move(ki));
            }
            Matrix<F> closed;
            if (!sys.proper()) {
                closed = sys.a;
                for (std::size_t i = 0; i < v; ++i) closed = closed + sys.b[i] * k[i] * sys.c[i];
            } else {
                // all-output stacked loop: I - [D_{ij} K_j] over the y blocks
                std::size_t rtot = 0;
                for (const auto& ci : sys.c) rtot += ci.rows();
                Matrix<F> loop = Matrix<F>::identity(rtot);
                std::size_t roff = 0;
                for (std::size_t i = 0; i < v; ++i) {
                    std::size_t coff = 0;
                    for (std::size_t j = 0; j < v; ++j) {
                        Matrix<F> blockm = (*sys.d)[i][j] * k[j];
                        for (std::size_t p = 0; p < blockm.rows(); ++p)
                            for (std::size_t q = 0; q < blockm.cols(); ++q)
                                loop(roff + p, coff + q) -= blockm(p, q);
                        coff += sys.c[j].rows();
                    }
                    roff += sys.c[i].rows();
                }
                if (FieldOps<F>::is_zero(detail::det_const(loop))) {
                    if (attempt >= 64) throw Error("gain draws keep I - DK singular");
                    continue;  // outside the admissible gain set, resample
                }
                Matrix<F> bk(m, rtot);
                {
                    std::size_t coff = 0;
                    for (std::size_t j = 0; j < v; ++j) {
                        bk.set_block(0, coff, sys.b[j] * k[j]);
                        coff += sys.c[j].rows();
                    }
                }
                Matrix<F> cstack(0, m);
                for (std::size_t i = 0; i < v; ++i) cstack = Matrix<F>::vstack(cstack, sys.c[i]);
                auto loop_inv = to_const_matrix(mat_inverse(to_ratfn_matrix(loop)));
                closed = sys.a + bk * loop_inv * cstack;
            }
            Matrix<F> lic = -closed;
            for (std::size_t i = 0; i < m; ++i) lic(i, i) += lambda;
            if (!FieldOps<F>::is_zero(detail::det_const(lic))) return false;
            break;
        }
    }
    return true;
}

/// Distinct eigenvalues of A with |lambda|^2 >= 1 that lie in the working
/// field. Raises UnsupportedSpectrum when the characteristic polynomial keeps
/// an unstable factor that does not split over the field.
template <class F>
std::vector<F> unstable_eigenvalues(const Matrix<F>& a) {
    Poly<F> chi = char_poly_const(a);
    std::vector<F> hints;
    for (std::size_t i = 0; i < a.rows(); ++i) hints.push_back(a(i, i));
    Poly<F> remainder;
    auto roots = field_roots(chi, hints, &remainder);
    if (remainder.deg() > 0) {
        auto count = roots_in_unit_disk(remainder);
        if (count.inside != static_cast<std::size_t>(remainder.deg()))
            throw UnsupportedSpectrum(
                "unstable eigenvalues outside the working field; supply candidates explicitly");
    }
    std::vector<F> out;
    for (const auto& r : roots) {
        if (FieldOps<F>::abs2(r) < 1) continue;
        bool seen = false;
        for (const auto& o : out) seen = seen || o == r;
        if (!seen) out.push_back(r);
    }
    return out;
}

/// Canonical-form externalization N_s(lambda I - A; -B_i, 0; C_i, 0; 0,0;
/// 0,0); the proper variant routes the feedthrough grid through the S-loop so
/// the relay-relay channels become D_{ji}.
template <class F>
StandardNetwork<F> externalize_canonical(const DecSystem<F>& sys, const F& lambda) {
    validate(sys);
    const std::size_t m = sys.dim();
    const std::size_t v = sys.controller_count();
    StandardNetwork<F> sn;
    Matrix<F> lia = -sys.a;
    for (std::size_t i = 0; i < m; ++i) lia(i, i) += lambda;
    sn.a = to_ratfn_matrix(lia);
    for (std::size_t i = 0; i < v; ++i) {
        sn.b.push_back(to_ratfn_matrix(Matrix<F>(-sys.b[i])));
        sn.c.push_back(to_ratfn_matrix(sys.c[i]));
    }
    if (!sys.proper()) {
        for (std::size_t i = 0; i < v; ++i) {
            sn.b_prime.push_back(RatMatrix<F>(0, sys.b[i].cols()));
            sn.c_prime.push_back(RatMatrix<F>(sys.c[i].rows(), 0));
        }
        sn.d = RatMatrix<F>(m, 0);
        sn.d_prime = RatMatrix<F>(0, m);
        sn.s = RatMatrix<F>(0, 0);
        sn.s_prime = RatMatrix<F>(0, 0);
        return sn;
    }
    std::size_t rtot = 0;
    std::vector<std::size_t> roff;
    for (const auto& ci : sys.c) {
        roff.push_back(rtot);
        rtot += ci.rows();
    }
    for (std::size_t i = 0; i < v; ++i) {
        RatMatrix<F> bp(rtot, sys.b[i].cols());
        for (std::size_t j = 0; j < v; ++j)
            bp.set_block(roff[j], 0, to_ratfn_matrix((*sys.d)[j][i]));
        sn.b_prime.push_back(std::move(bp));
        RatMatrix<F> cp(sys.c[i].rows(), rtot);
        for (std::size_t p = 0; p < sys.c[i].rows(); ++p) cp(p, roff[i] + p) = RatFn<F>(1);
        sn.c_prime.push_back(std::move(cp));
        sn.c[i] = RatMatrix<F>(sys.c[i].rows(), m);  // observations enter via the loop
    }
    RatMatrix<F> dstack(rtot, m);
    for (std::size_t i = 0; i < v; ++i) dstack.set_block(roff[i], 0, to_ratfn_matrix(sys.c[i]));
    sn.d = RatMatrix<F>(m, rtot);
    sn.d_prime = std::move(dstack);
    sn.s = RatMatrix<F>::identity(rtot);
    sn.s_prime = RatMatrix<F>(rtot, rtot);
    return sn;
}

/// Jordan-form externalization at z = lambda: the corner ports of the Jordan
/// blocks become the terminals and the trailing block feeds the S-loop, so
/// H_{tx,i} = C_{i,l,1}, H_{i,rx} = -B_{i,l,1} and
/// H_{i,j} = C_{j,l,2} A_{l,2,2}(lambda)^{-1} B_{i,l,2} (+ D_{ji} when
/// proper). There is no direct transmitter-receiver link.
template <class F>
StandardNetwork<F> externalize_jordan(const DecSystem<F>& sys, const F& lambda) {
    validate(sys);
    auto part = partition_jordan(sys.a, lambda, sys.b, sys.c);
    const std::size_t ml = part.indexing.m_lambda;
    const std::size_t mt = sys.dim() - ml;
    const std::size_t v = sys.controller_count();

    StandardNetwork<F> sn;
    sn.a = RatMatrix<F>(ml, ml);
    Matrix<F> a22l = eval_matrix(part.a22, lambda);
    if (!sys.proper()) {
        for (std::size_t i = 0; i < v; ++i) {
            sn.b.push_back(to_ratfn_matrix(Matrix<F>(-part.b1[i])));
            sn.b_prime.push_back(to_ratfn_matrix(part.b2[i]));
            sn.c.push_back(to_ratfn_matrix(part.c1[i]));
            sn.c_prime.push_back(to_ratfn_matrix(part.c2[i]));
        }
        sn.d = RatMatrix<F>(ml, mt);  // A_{l,1,2}(lambda) = 0
        sn.d_prime = RatMatrix<F>(mt, ml);
        sn.s = RatMatrix<F>::identity(mt);
        sn.s_prime = RatMatrix<F>::identity(mt) - to_ratfn_matrix(a22l);
        return sn;
    }
    std::size_t rtot = 0;
    std::vector<std::size_t> roff;
    for (const auto& ci : sys.c) {
        roff.push_back(rtot);
        rtot += ci.rows();
    }
    const std::size_t loop = mt + rtot;
    for (std::size_t i = 0; i < v; ++i) {
        sn.b.push_back(to_ratfn_matrix(Matrix<F>(-part.b1[i])));
        RatMatrix<F> bp(loop, sys.b[i].cols());
        bp.set_block(0, 0, to_ratfn_matrix(part.b2[i]));
        for (std::size_t j = 0; j < v; ++j)
            bp.set_block(mt + roff[j], 0, to_ratfn_matrix((*sys.d)[j][i]));
        sn.b_prime.push_back(std::move(bp));
        sn.c.push_back(RatMatrix<F>(sys.c[i].rows(), ml));
        RatMatrix<F> cp(sys.c[i].rows(), loop);
        for (std::size_t p = 0; p < sys.c[i].rows(); ++p) cp(p, mt + roff[i] + p) = RatFn<F>(1);
        sn.c_prime.push_back(std::move(cp));
    }
    sn.d = RatMatrix<F>(ml, loop);
    RatMatrix<F> dp(loop, ml);  // -A_{l,2,1}(lambda) = 0 atop the C_{i,l,1} stack
    for (std::size_t i = 0; i < v; ++i) dp.set_block(mt + roff[i], 0, to_ratfn_matrix(part.c1[i]));
    sn.d_prime = std::move(dp);
    sn.s = RatMatrix<F>::identity(loop);
    RatMatrix<F> sp(loop, loop);
    sp.set_block(0, 0, RatMatrix<F>::identity(mt) - to_ratfn_matrix(a22l));
    for (std::size_t i = 0; i < v; ++i)
        sp.set_block(mt + roff[i], 0, to_ratfn_matrix(part.c2[i]));
    sn.s_prime = std::move(sp);
    return sn;
}

struct EquivalenceStatement {
    std::string name;
    bool fixed = false;  // this statement's verdict: lambda is a fixed mode
};

struct EquivalenceReport {
    std::vector<EquivalenceStatement> statements;
    bool unanimous = false;
    bool fixed = false;
};

namespace detail {

template <class F>
std::size_t sampled_std_rank(const StandardNetwork<F>& sn, const RankConfig& cfg) {
    Sampler rng(cfg.seed);
    std::size_t best = 0;
    for (unsigned round = 0; round < cfg.rounds; ++round) {
        for (int attempt = 0;; ++attempt) {
            std::vector<RatMatrix<F>> k;
            for (std::size_t i = 0; i < sn.relay_count(); ++i)
                k.push_back(rng.template int_matrix<F>(sn.b[i].cols(), sn.c[i].rows(),
                                                       cfg.sample_bound));
            try {
                best = std::max(best, mat_rank(std_transfer(sn, k)));
                break;
            } catch (const InnerLoopSingular&) {
                if (attempt >= 64) throw;
            }
        }
    }
    return best;
}

}  // namespace detail

/// Runs the five equivalent fixed-mode characterizations independently:
/// gain sampling, the externalized transfer rank, the network transfer rank,
/// the network mincut, and the bordered-matrix minimum. The canonical branch
/// always runs; the Jordan branch joins when A is in Jordan form.
template <class F>
EquivalenceReport equivalence_report(const DecSystem<F>& sys, const F& lambda,
                                     const RankConfig& cfg) {
    validate(sys);
    const std::size_t m = sys.dim();
    EquivalenceReport rep;

    rep.statements.push_back({"sampling", fixed_mode_sampling(sys, lambda, cfg)});

    auto cn = externalize_canonical(sys, lambda);
    rep.statements.push_back(
        {"canonical transfer", detail::sampled_std_rank(cn, cfg) < m});
    auto cn_net = to_network(cn);
    rep.statements.push_back(
        {"canonical network rank",
         generic_rank(cn_net, std::optional<F>(), cfg, "tx", "rx") < m});
    rep.statements.push_back(
        {"canonical mincut", mincut_rank(cn_net, std::optional<F>(), "rx").rank < m});
    rep.statements.push_back({"bordered minimum", fixed_mode_algebraic(sys, lambda).fixed});

    if (is_jordan_form(sys.a)) {
        const std::size_t ml = m_lambda_of(sys.a, lambda);
        auto jd = externalize_jordan(sys, lambda);
        rep.statements.push_back(
            {"jordan transfer", detail::sampled_std_rank(jd, cfg) < ml});
        auto jd_net = to_network(jd);
        rep.statements.push_back(
            {"jordan network rank",
             generic_rank(jd_net, std::optional<F>(), cfg, "tx", "rx") < ml});
        rep.statements.push_back(
            {"jordan mincut", mincut_rank(jd_net, std::optional<F>(), "rx").rank < ml});
        // statement (5) in Jordan coordinates
        auto part = partition_jordan(sys.a, lambda, sys.b, sys.c);
        auto a22_inv = mat_inverse(to_ratfn_matrix(eval_matrix(part.a22, lambda)));
        const std::size_t v = sys.controller_count();
        std::size_t best = ml + 1;
        for (std::size_t mask = 0; mask < (std::size_t(1) << v); ++mask) {
            std::vector<std::size_t> in, out;
            for (std::size_t i = 0; i < v; ++i)
                (mask & (std::size_t(1) << i)) ? in.push_back(i) : out.push_back(i);
            RatMatrix<F> top(ml, ml);
            for (std::size_t j : in)
                top = RatMatrix<F>::hstack(top, to_ratfn_matrix(Matrix<F>(-part.b1[j])));
            RatMatrix<F> block = top;
            for (std::size_t i : out) {
                RatMatrix<F> row = to_ratfn_matrix(part.c1[i]);
                for (std::size_t j : in) {
                    RatMatrix<F> e = to_ratfn_matrix(part.c2[i]) * a22_inv *
                                     to_ratfn_matrix(part.b2[j]);
                    if (sys.proper()) e += to_ratfn_matrix((*sys.d)[i][j]);
                    row = RatMatrix<F>::hstack(row, e);
                }
                block = RatMatrix<F>::vstack(block, row);
            }
            best = std::min(best, mat_rank(block));
        }
        rep.statements.push_back({"jordan bordered minimum", best < ml});
    }

    rep.fixed = rep.statements.front().fixed;
    rep.unanimous = true;
    for (const auto& s : rep.statements) rep.unanimous = rep.unanimous && (s.fixed == rep.fixed);
    if (!rep.unanimous)
        throw EquivalenceViolation("fixed-mode characterizations disagree at this frequency");
    return rep;
}

}  // namespace ltiflow
