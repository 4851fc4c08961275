#include <catch2/catch_amalgamated.hpp>

#include "fixtures.hpp"
#include "ltiflow/jordan.hpp"

using namespace ltiflow;
using fixtures::Sampler;
using M = Matrix<Rat>;
using P = Poly<Rat>;
using R = RatFn<Rat>;

namespace {

// Jordan matrix from (eigenvalue, block size) pairs.
M jordan_from_blocks(const std::vector<std::pair<Rat, std::size_t>>& blocks) {
    std::size_t m = 0;
    for (const auto& [ev, sz] : blocks) m += sz;
    M a(m, m);
    std::size_t off = 0;
    for (const auto& [ev, sz] : blocks) {
        for (std::size_t i = 0; i < sz; ++i) {
            a(off + i, off + i) = ev;
            if (i + 1 < sz) a(off + i, off + i + 1) = Rat(1);
        }
        off += sz;
    }
    return a;
}

}  // namespace

TEST_CASE("appendix example: full indexing data") {
    Rat lambda(3), lambda_p(7);
    M a = jordan_from_blocks({{lambda, 3}, {lambda, 2}, {lambda_p, 1}});
    auto x = jordan_indexing(a, lambda);

    REQUIRE(x.kappa_l == std::vector<std::size_t>{0, 0, 0, 1, 1, 2, 2});
    REQUIRE(x.kappa_r == std::vector<std::size_t>{0, 1, 1, 1, 2, 2, 2});
    REQUIRE(x.m_lambda == 2);
    REQUIRE(x.iota_l == std::vector<std::size_t>{0, 3, 5});
    REQUIRE(x.iota_r == std::vector<std::size_t>{0, 1, 4});
    REQUIRE(x.pi_l == std::vector<std::size_t>{3, 4, 1, 5, 2, 6});
    REQUIRE(x.pi_r == std::vector<std::size_t>{1, 3, 4, 2, 5, 6});

    M pl_expect{{0, 0, 1, 0, 0, 0}, {0, 0, 0, 1, 0, 0}, {1, 0, 0, 0, 0, 0},
                {0, 0, 0, 0, 1, 0}, {0, 1, 0, 0, 0, 0}, {0, 0, 0, 0, 0, 1}};
    M pr_expect{{1, 0, 0, 0, 0, 0}, {0, 0, 1, 0, 0, 0}, {0, 0, 0, 1, 0, 0},
                {0, 1, 0, 0, 0, 0}, {0, 0, 0, 0, 1, 0}, {0, 0, 0, 0, 0, 1}};
    REQUIRE(x.p_l == pl_expect);
    REQUIRE(x.p_r == pr_expect);
}

TEST_CASE("appendix example: partitioned blocks") {
    Rat lambda(3), lambda_p(7);
    M a = jordan_from_blocks({{lambda, 3}, {lambda, 2}, {lambda_p, 1}});
    std::vector<M> b{M(6, 1)}, c{M(1, 6)};
    auto part = partition_jordan(a, lambda, b, c);

    R zl = R::z() - R(lambda);
    RatMatrix<Rat> a22_expect{{R(-1), R(0), R(0), R(0)},
                              {zl, R(-1), R(0), R(0)},
                              {R(0), R(0), R(-1), R(0)},
                              {R(0), R(0), R(0), R::z() - R(lambda_p)}};
    REQUIRE(part.a22 == a22_expect);
    REQUIRE(part.a11 == RatMatrix<Rat>(2, 2));
    // the 2x2 top-left block of the evaluated permutation is all zeros
    REQUIRE(eval_matrix(part.a11, lambda).is_zero());
    REQUIRE(eval_matrix(part.a12, lambda).is_zero());
    REQUIRE(eval_matrix(part.a21, lambda).is_zero());
    REQUIRE(mat_rank_const(eval_matrix(part.a22, lambda)) == 4);
}

TEST_CASE("appendix example: permuted controller blocks select rows 3,5 and columns 1,4") {
    Rat lambda(3), lambda_p(7);
    M a = jordan_from_blocks({{lambda, 3}, {lambda, 2}, {lambda_p, 1}});
    M b(6, 1), c(1, 6);
    for (std::size_t i = 0; i < 6; ++i) {
        b(i, 0) = Rat(static_cast<long>(10 + i));  // B_{i,j} = 10 + j - 1
        c(0, i) = Rat(static_cast<long>(20 + i));
    }
    auto part = partition_jordan(a, lambda, {b}, {c});
    REQUIRE(part.b1[0] == M{{Rat(12)}, {Rat(14)}});          // rows 3 and 5
    REQUIRE(part.b2[0] == M{{Rat(10)}, {Rat(11)}, {Rat(13)}, {Rat(15)}});
    REQUIRE(part.c1[0] == M{{Rat(20), Rat(23)}});            // columns 1 and 4
    REQUIRE(part.c2[0] == M{{Rat(21), Rat(22), Rat(24), Rat(25)}});
}

TEST_CASE("diagonal matrix: identity permutations") {
    Rat lambda(5);
    M a = jordan_from_blocks({{lambda, 1}, {lambda, 1}});
    auto x = jordan_indexing(a, lambda);
    REQUIRE(x.kappa_l == std::vector<std::size_t>{0, 1, 2});
    REQUIRE(x.kappa_r == std::vector<std::size_t>{0, 1, 2});
    REQUIRE(x.p_l == M::identity(2));
    REQUIRE(x.p_r == M::identity(2));
    REQUIRE(x.m_lambda == 2);
}

TEST_CASE("single 2x2 block") {
    Rat lambda(2);
    M a = jordan_from_blocks({{lambda, 2}});
    auto x = jordan_indexing(a, lambda);
    REQUIRE(x.m_lambda == 1);
    REQUIRE(x.iota_l == std::vector<std::size_t>{0, 2});
    REQUIRE(x.iota_r == std::vector<std::size_t>{0, 1});
}

TEST_CASE("corner selectors satisfy the permutation identities") {
    Sampler rng(71);
    for (int t = 0; t < 30; ++t) {
        std::vector<std::pair<Rat, std::size_t>> blocks;
        int nb = 1 + static_cast<int>(rng.uniform_int(0, 3));
        for (int k = 0; k < nb; ++k)
            blocks.emplace_back(Rat(rng.uniform_int(2, 4)), 1 + rng.uniform_int(0, 2));
        M a = jordan_from_blocks(blocks);
        Rat lambda(rng.uniform_int(2, 4));
        auto x = jordan_indexing(a, lambda);

        REQUIRE(x.kappa_l.back() == x.kappa_r.back());
        // pi maps are bijections
        std::vector<bool> seen(a.rows(), false);
        for (std::size_t v : x.pi_l) {
            REQUIRE(!seen[v - 1]);
            seen[v - 1] = true;
        }
        if (x.m_lambda == 0) continue;

        // C_lambda P_R = [I 0] and P_L^T B_lambda = [I; 0]
        M cp = x.c_lambda * x.p_r;
        M pb = x.p_l.transpose() * x.b_lambda;
        for (std::size_t i = 0; i < x.m_lambda; ++i)
            for (std::size_t j = 0; j < a.rows(); ++j) {
                REQUIRE(cp(i, j) == ((j == i) ? Rat(1) : Rat(0)));
                REQUIRE(pb(j, i) == ((j == i) ? Rat(1) : Rat(0)));
            }

        auto part = partition_jordan(a, lambda, {}, {});
        REQUIRE(eval_matrix(part.a11, lambda).is_zero());
        REQUIRE(mat_rank_const(eval_matrix(part.a22, lambda)) == a.rows() - x.m_lambda);
    }
}

TEST_CASE("non-jordan input is rejected") {
    M a{{Rat(1), Rat(2)}, {Rat(0), Rat(1)}};
    REQUIRE_THROWS_AS(jordan_indexing(a, Rat(1)), NotJordanForm);
    M b{{Rat(1), Rat(1)}, {Rat(0), Rat(2)}};  // superdiagonal 1 between unequal eigenvalues
    REQUIRE_THROWS_AS(jordan_indexing(b, Rat(1)), NotJordanForm);
}
